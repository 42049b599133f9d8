use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// How `(beta, eps)` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `beta = delta / 20`, `eps = delta / (5000 log2 n)`, `delta <= 1e-3`.
    Paper,
    /// `beta` and `eps` given directly.
    Experiment,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Mode::Paper),
            "experiment" => Ok(Mode::Experiment),
            other => Err(format!("unknown mode {other:?}, expected paper|experiment")),
        }
    }
}

/// Parameters of one uniform sparsifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub delta: Option<f64>,
    pub beta: f64,
    pub eps: f64,
    pub lambda: f64,
    pub mode: Mode,
}

/// `(beta, eps)` tied to `delta` by `delta = 20 beta = 5000 eps log2 n`.
pub fn delta_constants(n: usize, delta: f64) -> Result<(f64, f64), ParamError> {
    if !(delta > 0.0 && delta <= 1e-3) {
        return Err(ParamError::BadDelta(delta));
    }
    if n < 2 {
        return Err(ParamError::TooFewNodes(n));
    }
    let beta = delta / 20.0;
    let eps = delta / (5000.0 * (n as f64).log2());
    Ok((beta, eps))
}

/// The unique `k >= 0` with `beta/2 <= 2^k lambda < beta`.
pub fn compute_levels(lambda: f64, beta: f64) -> Result<usize, ParamError> {
    if !(lambda > 0.0 && lambda < beta) {
        return Err(ParamError::LambdaOutOfRange { lambda, beta });
    }
    let mut k = 0;
    let mut x = lambda;
    // doubling is exact, so the bracket test is exact too
    while 2.0 * x < beta {
        x *= 2.0;
        k += 1;
    }
    Ok(k)
}

fn unit(name: &'static str, value: f64) -> Result<(), ParamError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(ParamError::OutOfUnitInterval { name, value })
    }
}

impl Params {
    pub fn experiment(n: usize, eps: f64, beta: f64, lambda: f64) -> Result<Self, ParamError> {
        let p = Params { n, delta: None, beta, eps, lambda, mode: Mode::Experiment };
        p.validate(false)?;
        Ok(p)
    }

    pub fn from_delta(n: usize, delta: f64, lambda: f64) -> Result<Self, ParamError> {
        let (beta, eps) = delta_constants(n, delta)?;
        let p = Params { n, delta: Some(delta), beta, eps, lambda, mode: Mode::Paper };
        p.validate(true)?;
        Ok(p)
    }

    /// Same `(beta, eps, mode)` at another `lambda`, without the `delta/n^2`
    /// floor: the general sparsifier's lowest class sits at `beta/n^2`.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self, ParamError> {
        let p = Params { lambda, ..*self };
        p.check_ranges()?;
        Ok(p)
    }

    fn check_ranges(&self) -> Result<(), ParamError> {
        if self.n < 2 {
            return Err(ParamError::TooFewNodes(self.n));
        }
        unit("eps", self.eps)?;
        unit("beta", self.beta)?;
        compute_levels(self.lambda, self.beta)?;
        Ok(())
    }

    /// Range checks. `enforce_floor` rejects `lambda < delta/n^2`; otherwise
    /// such a `lambda` is only logged.
    pub fn validate(&self, enforce_floor: bool) -> Result<(), ParamError> {
        self.check_ranges()?;
        if let Some(delta) = self.delta {
            let floor = delta / (self.n as f64).powi(2);
            if self.lambda < floor {
                if enforce_floor {
                    return Err(ParamError::LambdaBelowFloor { lambda: self.lambda, floor });
                }
                log::warn!("lambda = {} is below delta/n^2 = {floor}", self.lambda);
            }
        }
        Ok(())
    }

    /// Peel threshold `floor(1/eps)`.
    pub fn peel_threshold(&self) -> usize {
        (1.0 / self.eps).floor() as usize
    }

    /// Number of doubling rounds `L`.
    pub fn levels(&self) -> usize {
        compute_levels(self.lambda, self.beta).expect("validated")
    }

    /// Weight of an edge frozen at `level`.
    pub fn level_weight(&self, level: usize) -> f64 {
        self.lambda * (1u64 << level) as f64
    }

    /// Out-degree bounds `(floor(1/eps), ceil((2/beta)(1 + 4 eps L)))` for
    /// nodes below and at the top level.
    pub fn orientation_bounds(&self) -> (usize, usize) {
        let top = self.levels() as f64;
        let high = (2.0 / self.beta) * (1.0 + 4.0 * self.eps * top);
        (self.peel_threshold(), high.ceil() as usize)
    }

    /// `1 + 60 eps log2(beta/lambda)`.
    pub fn certificate_factor(&self) -> f64 {
        1.0 + 60.0 * self.eps * (self.beta / self.lambda).log2()
    }
}
