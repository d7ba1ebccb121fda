/// Logistic function, evaluated without overflow for large `|z|`.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BceOutput {
    pub probability: f64,
    pub loss: f64,
    /// `dloss/dlogit = p - y`
    pub grad_logit: f64,
}

/// Sigmoid followed by binary cross-entropy, fused as
/// `max(z, 0) - z*y + ln(1 + e^{-|z|})`.
pub fn sigmoid_bce(logit: f64, label: bool) -> BceOutput {
    let y = if label { 1.0 } else { 0.0 };
    let p = sigmoid(logit);
    let loss = logit.max(0.0) - logit * y + (-logit.abs()).exp().ln_1p();
    BceOutput {
        probability: p,
        loss,
        grad_logit: p - y,
    }
}
