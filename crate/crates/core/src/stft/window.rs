use super::WindowKind;

/// Modified Bessel function of the first kind, order zero (power series).
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Symmetric window of length `len`.
pub fn window(kind: WindowKind, len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let m = (len - 1) as f64;
    match kind {
        WindowKind::Rectangular => vec![1.0; len],
        WindowKind::Hann => (0..len)
            .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / m).cos())
            .collect(),
        WindowKind::Kaiser { beta } => {
            let denom = bessel_i0(beta);
            (0..len)
                .map(|n| {
                    let r = 2.0 * n as f64 / m - 1.0;
                    bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / denom
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i0_reference_values() {
        // tabulated: I0(0)=1, I0(1)=1.2660658777520082, I0(8)=427.56411572180474
        assert_eq!(bessel_i0(0.0), 1.0);
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_2).abs() < 1e-14);
        assert!((bessel_i0(8.0) / 427.564_115_721_804_74 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kaiser_shape() {
        let w = window(WindowKind::Kaiser { beta: 8.0 }, 8);
        assert_eq!(w.len(), 8);
        for k in 0..8 {
            assert!((w[k] - w[7 - k]).abs() < 1e-15);
        }
        assert!((w[0] - 1.0 / bessel_i0(8.0)).abs() < 1e-15);
        assert!(w[3] > w[2] && w[2] > w[1] && w[1] > w[0]);
        let k0 = window(WindowKind::Kaiser { beta: 0.0 }, 16);
        assert!(k0.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }
}
