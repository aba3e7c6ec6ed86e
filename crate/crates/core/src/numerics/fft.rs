use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub fn is_power_of_two(n: usize) -> bool {
    n >= 2 && n.is_power_of_two()
}

/// Smallest power of two that is `>= n` (and at least 2).
pub fn next_power_of_two(n: usize) -> usize {
    n.max(2).next_power_of_two()
}

/// Precomputed twiddles and bit-reversal permutation for an iterative
/// radix-2 decimation-in-time FFT of one fixed length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if !is_power_of_two(len) {
            return Err(Error::NotPowerOfTwo(len));
        }
        // Each twiddle is evaluated directly rather than by recurrence so
        // that rounding error does not accumulate along the table.
        let twiddles = (0..len / 2)
            .map(|k| {
                let (s, c) = (-2.0 * PI * k as f64 / len as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        let bits = len.trailing_zeros();
        let bitrev = (0..len).map(|i| i.reverse_bits() >> (usize::BITS - bits)).collect();
        Ok(Self { len, twiddles, bitrev })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform, `X[k] = sum_n x[n] exp(-2 pi i k n / F)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// In-place inverse transform including the `1/F` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.len as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n, "buffer length does not match FFT plan");
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }

    /// Forward transform of a real sequence.
    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }
}

/// DFT of a real vector whose length is a power of two.
pub fn fft_real(x: &[f64]) -> Result<Vec<Complex64>> {
    Ok(FftPlan::new(x.len())?.forward_real(x))
}

/// Inverse DFT, returning the real part. Intended for spectra of real
/// sequences (Hermitian input).
pub fn ifft_real(spectrum: &[Complex64]) -> Result<Vec<f64>> {
    let plan = FftPlan::new(spectrum.len())?;
    let mut buf = spectrum.to_vec();
    plan.inverse(&mut buf);
    Ok(buf.into_iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn impulse_is_flat() {
        let x = fft_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(x.iter().all(|&v| close(v, Complex64::new(1.0, 0.0))));
    }

    #[test]
    fn constant_is_dc_only() {
        let x = fft_real(&[1.0; 4]).unwrap();
        let want = [4.0, 0.0, 0.0, 0.0].map(|r| Complex64::new(r, 0.0));
        assert!(x.iter().zip(want).all(|(&a, b)| close(a, b)));
    }

    #[test]
    fn four_point_sine() {
        let x = fft_real(&[0.0, 1.0, 0.0, -1.0]).unwrap();
        let want =
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -2.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0)];
        assert!(x.iter().zip(want).all(|(&a, b)| close(a, b)), "{x:?}");
    }

    #[test]
    fn rejects_bad_lengths() {
        assert_eq!(fft_real(&[1.0; 6]).unwrap_err(), Error::NotPowerOfTwo(6));
        assert_eq!(fft_real(&[1.0]).unwrap_err(), Error::NotPowerOfTwo(1));
        assert_eq!(fft_real(&[]).unwrap_err(), Error::NotPowerOfTwo(0));
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<f64> = (0..32).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let fast = fft_real(&x).unwrap();
        for (k, &got) in fast.iter().enumerate() {
            let naive: Complex64 =
                x.iter().enumerate().map(|(n, &v)| Complex64::from_polar(v, -2.0 * PI * (k * n) as f64 / 32.0)).sum();
            assert!((got - naive).norm() < 1e-10);
        }
    }

    #[test]
    fn next_pow2() {
        assert_eq!(next_power_of_two(1), 2);
        assert_eq!(next_power_of_two(1028), 2048);
        assert_eq!(next_power_of_two(1024), 1024);
    }
}
