/* matrix product fixture 27: intrinsics */

typedef struct { double v[4]; } vec4_27;

static vec4_27 vec4_fma_27(vec4_27 acc, const double *a, const double *b) {
    for (int lane = 0; lane < 4; lane++)
        acc.v[lane] += a[lane] * b[lane];
    return acc;
}

void matmul_27(const double *a, const double *b, double *c, int n) {
    for (int r = 0; r < n; r++)
        for (int col = 0; col < n; col += 4) {
            vec4_27 acc = {{0.0, 0.0, 0.0, 0.0}};
            for (int k = 0; k < n; k++)
                acc = vec4_fma_27(acc, &a[r * n + k], &b[k * n + col]);
            for (int lane = 0; lane < 4; lane++)
                c[r * n + col + lane] = acc.v[lane];
        }
}
