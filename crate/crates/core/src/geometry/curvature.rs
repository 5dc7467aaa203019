use crate::error::{Result, TangenciaError};

/// Step sizes and thresholds for [`check_cinematic_curvature`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureOptions {
    /// Central-difference step for the reported gradient.
    pub h: f64,
    /// Step for each level of the nested differences in the determinant.
    /// Three nested levels amplify roundoff like `eps / h^3`, so this is
    /// much coarser than `h`.
    pub h_nested: f64,
    pub gradient_threshold: f64,
    pub determinant_threshold: f64,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        CurvatureOptions {
            h: 1e-5,
            h_nested: 1e-2,
            gradient_threshold: 1e-6,
            determinant_threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub gradient_norm: f64,
    pub determinant: f64,
    pub pass: bool,
}

fn grad_y<F: Fn([f64; 2], [f64; 2]) -> f64>(phi: &F, x: [f64; 2], y: [f64; 2], h: f64) -> [f64; 2] {
    let d0 = (phi(x, [y[0] + h, y[1]]) - phi(x, [y[0] - h, y[1]])) / (2.0 * h);
    let d1 = (phi(x, [y[0], y[1] + h]) - phi(x, [y[0], y[1] - h])) / (2.0 * h);
    [d0, d1]
}

/// Checks both cinematic curvature conditions for `phi` at `(a, b)` by
/// nested central differences.
///
/// Rows of the tested map are `e·∇_yΦ` and `e·∇_y(e·∇_yΦ / |∇_yΦ|)` with `e`
/// the unit vector orthogonal to `∇_yΦ(a, b)`; the determinant is that of
/// their gradient in `x`.
pub fn check_cinematic_curvature<F>(
    phi: F,
    a: [f64; 2],
    b: [f64; 2],
    opts: CurvatureOptions,
) -> Result<CurvatureReport>
where
    F: Fn([f64; 2], [f64; 2]) -> f64,
{
    let g = grad_y(&phi, a, b, opts.h);
    let gn = g[0].hypot(g[1]);
    if !(gn > opts.gradient_threshold) {
        return Err(TangenciaError::FirstConditionViolated(gn));
    }
    let e = [-g[1] / gn, g[0] / gn];
    let hn = opts.h_nested;

    let row1 = |x: [f64; 2]| {
        let gy = grad_y(&phi, x, b, hn);
        e[0] * gy[0] + e[1] * gy[1]
    };
    let normalized = |x: [f64; 2], y: [f64; 2]| {
        let gy = grad_y(&phi, x, y, hn);
        (e[0] * gy[0] + e[1] * gy[1]) / gy[0].hypot(gy[1])
    };
    let row2 = |x: [f64; 2]| {
        let plus = [b[0] + hn * e[0], b[1] + hn * e[1]];
        let minus = [b[0] - hn * e[0], b[1] - hn * e[1]];
        (normalized(x, plus) - normalized(x, minus)) / (2.0 * hn)
    };
    let dx = |f: &dyn Fn([f64; 2]) -> f64, k: usize| {
        let mut p = a;
        let mut m = a;
        p[k] += hn;
        m[k] -= hn;
        (f(p) - f(m)) / (2.0 * hn)
    };
    let j11 = dx(&row1, 0);
    let j12 = dx(&row1, 1);
    let j21 = dx(&row2, 0);
    let j22 = dx(&row2, 1);
    let det = j11 * j22 - j12 * j21;
    Ok(CurvatureReport {
        gradient_norm: gn,
        determinant: det,
        pass: gn > opts.gradient_threshold && det.abs() > opts.determinant_threshold,
    })
}
