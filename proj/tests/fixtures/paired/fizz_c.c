int main(){
    int n, i;
    scanf("%d", &n);
    for (i = 1; i <= n; i++) {
        if (i % 3 == 0) {
            printf("Fizz\n");
        } else {
            printf("%d\n", i);
        }
    }
    return 0;
}
