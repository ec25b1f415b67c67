/// Position, momentum, iteration counter and current step size.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub k: usize,
    pub step: f64,
}

impl IterateState {
    /// Starts at rest (`u = 0`).
    pub fn at_rest(x: Vec<f64>, step: f64) -> Self {
        let u = vec![0.0; x.len()];
        Self { x, u, k: 0, step }
    }

    pub fn new(x: Vec<f64>, u: Vec<f64>, step: f64) -> crate::Result<Self> {
        crate::error::check_len(x.len(), u.len())?;
        if !(step > 0.0) {
            return Err(crate::Error::InvalidParameter(format!("step must be positive, got {step}")));
        }
        Ok(Self { x, u, k: 0, step })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}
