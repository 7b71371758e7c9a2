/* convolution fixture 9: winograd */

static void conv_tap_9(const float g[3], float u[4]) {
    u[0] = g[0];
    u[1] = 0.5f * (g[0] + g[1] + g[2]);
    u[2] = 0.5f * (g[0] - g[1] + g[2]);
    u[3] = g[2];
}

void conv2d_9(const float *x, const float *g, float *y, int n) {
    float u[4];
    conv_tap_9(g, u);
    for (int t = 0; t + 3 < n; t += 2) {
        float m0 = (x[t] - x[t + 2]) * u[0];
        float m1 = (x[t + 1] + x[t + 2]) * u[1];
        float m2 = (x[t + 2] - x[t + 1]) * u[2];
        float m3 = (x[t + 1] - x[t + 3]) * u[3];
        y[t] = m0 + m1 + m2;
        y[t + 1] = m1 - m2 - m3;
    }
}
