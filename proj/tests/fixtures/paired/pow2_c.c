int main(){
    int n, i;
    long p;
    scanf("%d", &n);
    p = 1;
    for (i = 0; i < n; i++) {
        p = p * 2;
    }
    printf("%ld\n", p);
    return 0;
}
