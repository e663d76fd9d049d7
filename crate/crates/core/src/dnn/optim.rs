use super::net::{Grads, Param};

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    m: Grads,
    v: Grads,
}

impl Adam {
    pub fn new(params: &[Param]) -> Self {
        let zeros: Grads = params.iter().map(|p| vec![0.0; p.data.len()]).collect();
        Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [Param], grads: &Grads, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for (((p, g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            for i in 0..p.data.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let mh = m[i] / c1;
                let vh = v[i] / c2;
                p.data[i] -= lr * mh / (vh.sqrt() + self.eps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        // bias correction makes the first update ±lr regardless of scale
        let mut params = vec![Param {
            name: "w".into(),
            shape: vec![3],
            data: vec![1.0, 1.0, 1.0],
            decay: true,
        }];
        let mut adam = Adam::new(&params);
        adam.step(&mut params, &vec![vec![5.0, -0.01, 0.0]], 0.1);
        assert!((params[0].data[0] - 0.9).abs() < 1e-6);
        assert!((params[0].data[1] - 1.1).abs() < 1e-4);
        assert_eq!(params[0].data[2], 1.0);
    }

    #[test]
    fn minimizes_a_quadratic() {
        let mut params = vec![Param {
            name: "x".into(),
            shape: vec![1],
            data: vec![3.0],
            decay: false,
        }];
        let mut adam = Adam::new(&params);
        for _ in 0..2000 {
            let g = vec![vec![2.0 * (params[0].data[0] + 1.0)]];
            adam.step(&mut params, &g, 0.05);
        }
        assert!((params[0].data[0] + 1.0).abs() < 1e-3);
    }
}
