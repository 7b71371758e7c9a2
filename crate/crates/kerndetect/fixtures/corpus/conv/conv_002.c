/* convolution fixture 2: im2col */

static void conv_tap_2(const float *x, float *col, int n, int k) {
    for (int t = 0; t < n - k + 1; t++)
        for (int j = 0; j < k; j++)
            col[t * k + j] = x[t + j];
}

void conv2d_2(const float *x, const float *w, float *y, int n, int k, float *scratch) {
    conv_tap_2(x, scratch, n, k);
    for (int t = 0; t < n - k + 1; t++) {
        float acc = 0.0f;
        for (int j = 0; j < k; j++)
            acc += scratch[t * k + j] * w[j];
        y[t] = acc;
    }
}
