int main(){
    int n, i, x, m;
    scanf("%d", &n);
    scanf("%d", &m);
    for (i = 1; i < n; i++) {
        scanf("%d", &x);
        if (x < m) {
            m = x;
        }
    }
    printf("%d\n", m);
    return 0;
}
