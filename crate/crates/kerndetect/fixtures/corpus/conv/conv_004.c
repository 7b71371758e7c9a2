/* convolution fixture 4: direct */

static float conv_tap_4(const float *x, const float *w, int k) {
    float acc = 0.0f;
    for (int j = 0; j < k; j++)
        acc += x[j] * w[k - 1 - j];
    return acc;
}

void conv2d_4(const float *x, const float *w, float *y, int n, int k) {
    for (int t = 0; t + k <= n; t++)
        y[t] = conv_tap_4(&x[t], w, k);
}
