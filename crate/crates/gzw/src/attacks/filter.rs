//! Butterworth low-pass design (bilinear transform, second-order sections)
//! and zero-phase forward-backward filtering.

/// One biquad section, direct form II transposed.
#[derive(Debug, Clone, Copy)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// Steady-state filter state for a unit-step input. Scaling this by the
    /// first sample before filtering removes the startup transient for
    /// signals that begin near steady state (DC passes through exactly).
    fn unit_step_state(&self) -> (f64, f64) {
        // With x = 1 and unity DC gain, y settles at 1.
        let s2 = self.b2 - self.a2;
        let s1 = self.b1 - self.a1 + s2;
        (s1, s2)
    }

    fn filter_in_place(&self, x: &mut [f64], init_scale: f64) {
        let (zi1, zi2) = self.unit_step_state();
        let mut s1 = zi1 * init_scale;
        let mut s2 = zi2 * init_scale;
        for v in x.iter_mut() {
            let input = *v;
            let y = self.b0 * input + s1;
            s1 = self.b1 * input - self.a1 * y + s2;
            s2 = self.b2 * input - self.a2 * y;
            *v = y;
        }
    }

    /// Magnitude response at a digital frequency (radians/sample).
    pub fn magnitude(&self, omega: f64) -> f64 {
        let z1 = num_complex::Complex64::cis(-omega);
        let z2 = z1 * z1;
        let num = num_complex::Complex64::new(self.b0, 0.0) + z1 * self.b1 + z2 * self.b2;
        let den = num_complex::Complex64::new(1.0, 0.0) + z1 * self.a1 + z2 * self.a2;
        (num / den).norm()
    }
}

/// Even-order Butterworth low-pass as a cascade of biquads with unity DC
/// gain each. Cutoff is the -3 dB frequency.
pub fn butterworth_lowpass(order: usize, cutoff_hz: f64, sample_rate: f64) -> Vec<Biquad> {
    assert!(order >= 2 && order.is_multiple_of(2), "order must be even");
    let warp = (std::f64::consts::PI * cutoff_hz / sample_rate).tan();
    (0..order / 2)
        .map(|m| {
            // Prototype pole pair at angle pi*(2m+1+order)/(2*order) on the
            // unit circle (left half-plane), cutoff scaled by `warp`.
            let theta = std::f64::consts::PI * (2 * (m + 1) + order - 1) as f64
                / (2 * order) as f64;
            let a = warp * warp;
            let b = -2.0 * theta.cos() * warp;
            let d0 = 1.0 + b + a;
            Biquad {
                b0: a / d0,
                b1: 2.0 * a / d0,
                b2: a / d0,
                a1: (2.0 * a - 2.0) / d0,
                a2: (1.0 - b + a) / d0,
            }
        })
        .collect()
}

/// Zero-phase filtering: odd-reflection padding, forward pass, reverse pass.
/// Output length equals input length.
pub fn filtfilt(sos: &[Biquad], x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let padlen = (3 * (2 * sos.len() + 1)).min(x.len() - 1);

    let mut ext = Vec::with_capacity(x.len() + 2 * padlen);
    let first = x[0];
    let last = x[x.len() - 1];
    for i in (1..=padlen).rev() {
        ext.push(2.0 * first - x[i]);
    }
    ext.extend_from_slice(x);
    for i in 1..=padlen {
        ext.push(2.0 * last - x[x.len() - 1 - i]);
    }

    for pass in 0..2 {
        for section in sos {
            let scale = ext[0];
            section.filter_in_place(&mut ext, scale);
        }
        if pass == 0 {
            ext.reverse();
        }
    }
    ext.reverse();
    ext[padlen..padlen + x.len()].to_vec()
}
