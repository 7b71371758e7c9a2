/* fourier transform fixture 13: radix2 */

#include <math.h>

static void fft_stage_13(double *re, double *im, int n, int half) {
    for (int k = 0; k < half; k++) {
        double angle = -M_PI * k / half;
        double wr = cos(angle), wi = sin(angle);
        double tr = wr * re[k + half] - wi * im[k + half];
        double ti = wr * im[k + half] + wi * re[k + half];
        re[k + half] = re[k] - tr;
        im[k + half] = im[k] - ti;
        re[k] += tr;
        im[k] += ti;
    }
}

void fft_13(double *re, double *im, int n) {
    for (int half = n / 2; half >= 1; half /= 2)
        for (int start = 0; start < n; start += 2 * half)
            fft_stage_13(&re[start], &im[start], n, half);
}
