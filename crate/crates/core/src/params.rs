use crate::error::{Result, TangenciaError};

/// Scale parameters and structural constants shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    /// Neighborhood width.
    pub delta: f64,
    /// Separation scale of a bipartite pair.
    pub t: f64,
    /// Radius of the observation ball centered at the origin; infinite means full circles.
    pub alpha: f64,
    pub mu: usize,
    pub nu: usize,
    /// Comparability constant.
    pub a0: f64,
    /// Incidence constant.
    pub c1: f64,
    /// Exclusion radius around a cone apex, in units of delta.
    pub exclusion: f64,
    /// Cone shell half-width, in units of delta.
    pub shell_width: f64,
    /// Degree budget for a single partitioning polynomial.
    pub degree_budget: usize,
    pub epsilon: f64,
    /// Degree of the defining function; 2 for circles.
    pub k: usize,
    /// A pair requires `t > separation_const * delta`.
    pub separation_const: f64,
    /// Constant in "incident to at least C*mu circles".
    pub type_const: f64,
    /// Allowed cell overload factor for partitions.
    pub slack: f64,
}

impl Default for ParamSet {
    fn default() -> Self {
        ParamSet {
            delta: 1e-3,
            t: 0.25,
            alpha: f64::INFINITY,
            mu: 1,
            nu: 1,
            a0: 4.0,
            c1: 3.0,
            exclusion: 10.0,
            shell_width: 2.0,
            degree_budget: 16,
            epsilon: 0.5,
            k: 2,
            separation_const: 100.0,
            type_const: 1.0,
            slack: 2.0,
        }
    }
}

impl ParamSet {
    pub fn with_scales(delta: f64, t: f64) -> Result<Self> {
        let p = ParamSet {
            delta,
            t,
            ..ParamSet::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TangenciaError::InvalidParams(m.to_string()));
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad("delta must be positive and finite");
        }
        if !(self.delta < self.t && self.t < 1.0) {
            return bad("require delta < t < 1");
        }
        if !(self.alpha > 0.0) {
            return bad("alpha must be positive");
        }
        if self.mu == 0 || self.nu == 0 {
            return bad("mu and nu must be positive");
        }
        if !(self.a0 >= 1.0 && self.c1 >= 1.0 && self.exclusion >= 1.0) {
            return bad("A0, C1 and A must be at least 1");
        }
        if !(self.shell_width > 0.0) {
            return bad("shell width must be positive");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.slack >= 1.0) {
            return bad("slack must be at least 1");
        }
        Ok(())
    }

    /// Length of a rectangle's spine, `sqrt(delta / t)`.
    pub fn arc_length(&self) -> f64 {
        (self.delta / self.t).sqrt()
    }

    /// Minimum incidence count on the white side for type (>=mu, >=nu).
    pub fn mu_threshold(&self) -> usize {
        ((self.type_const * self.mu as f64).ceil() as usize).max(1)
    }

    pub fn nu_threshold(&self) -> usize {
        ((self.type_const * self.nu as f64).ceil() as usize).max(1)
    }
}
