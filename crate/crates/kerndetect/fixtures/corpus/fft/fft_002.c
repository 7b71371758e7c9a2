/* fourier transform fixture 2: recursive */

#include <math.h>

void fft_2(double *re, double *im, int n, int stride) {
    if (n == 1)
        return;
    fft_2(re, im, n / 2, stride * 2);
    fft_2(re + stride, im + stride, n / 2, stride * 2);
    for (int k = 0; k < n / 2; k++) {
        double angle = -2.0 * M_PI * k / n;
        double wr = cos(angle), wi = sin(angle);
        double tr = wr * re[(2 * k + 1) * stride] - wi * im[(2 * k + 1) * stride];
        double ti = wr * im[(2 * k + 1) * stride] + wi * re[(2 * k + 1) * stride];
        re[(2 * k + 1) * stride] = re[2 * k * stride] - tr;
        im[(2 * k + 1) * stride] = im[2 * k * stride] - ti;
        re[2 * k * stride] += tr;
        im[2 * k * stride] += ti;
    }
}
