int main(){
   int x;

   scanf("%d",&x);

   if(x>=30){
      printf("Yes");
   }else{
      printf("No");
   }

    return 0;
}
