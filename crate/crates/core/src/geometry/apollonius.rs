use super::{delta_c, dist, Circle};
use crate::error::{Result, TangenciaError};

/// Largest internal-type tangency residual of `g` against the inputs.
pub fn tangency_residual(g: &Circle, inputs: &[Circle]) -> f64 {
    inputs.iter().map(|h| delta_c(g, h)).fold(0.0, f64::max)
}

/// Circles tangent to all three inputs with aligned outward normals, i.e.
/// solutions of `|x - x_i| = |r - r_i|` for `i = 1, 2, 3` with `r > 0`.
///
/// Subtracting the squared equations pairwise leaves a line in `(x, y, r)`
/// space; the remaining quadratic has at most two roots, each polished by
/// Newton's method on the full system.
pub fn apollonius_internal_tangents(g1: &Circle, g2: &Circle, g3: &Circle) -> Result<Vec<Circle>> {
    let gs = [*g1, *g2, *g3];
    let scale = gs
        .iter()
        .map(|g| g.x().abs().max(g.y().abs()).max(g.radius()))
        .fold(1.0, f64::max);
    for i in 0..3 {
        for j in (i + 1)..3 {
            if dist(gs[i].center(), gs[j].center()) <= 1e-12 * scale {
                return Err(TangenciaError::ApolloniusDegenerate(format!(
                    "inputs {i} and {j} are concentric"
                )));
            }
        }
    }

    // Rows [2dx, 2dy, -2dr] . (x, y, r) = rhs
    let row = |g: &Circle| -> ([f64; 3], f64) {
        let (dx, dy, dr) = (g.x() - g1.x(), g.y() - g1.y(), g.radius() - g1.radius());
        let rhs = (g.x() * g.x() + g.y() * g.y() - g1.x() * g1.x() - g1.y() * g1.y())
            - (g.radius() * g.radius() - g1.radius() * g1.radius());
        ([2.0 * dx, 2.0 * dy, -2.0 * dr], rhs)
    };
    let (m1, b1) = row(g2);
    let (m2, b2) = row(g3);
    let nvec = cross(m1, m2);
    let nn = dot(nvec, nvec).sqrt();
    let mscale = dot(m1, m1).sqrt() * dot(m2, m2).sqrt();
    if nn <= 1e-12 * mscale {
        return Err(TangenciaError::ApolloniusDegenerate(
            "linear system is rank deficient".into(),
        ));
    }
    let dir = [nvec[0] / nn, nvec[1] / nn, nvec[2] / nn];
    // minimum-norm particular solution p = M^T (M M^T)^{-1} b
    let (a11, a12, a22) = (dot(m1, m1), dot(m1, m2), dot(m2, m2));
    let det = a11 * a22 - a12 * a12;
    let l1 = (a22 * b1 - a12 * b2) / det;
    let l2 = (a11 * b2 - a12 * b1) / det;
    let p = [
        l1 * m1[0] + l2 * m2[0],
        l1 * m1[1] + l2 * m2[1],
        l1 * m1[2] + l2 * m2[2],
    ];

    // |X(s) - x1|^2 - (r(s) - r1)^2 = 0 along p + s dir
    let q = [p[0] - g1.x(), p[1] - g1.y(), p[2] - g1.radius()];
    let a = dir[0] * dir[0] + dir[1] * dir[1] - dir[2] * dir[2];
    let b = 2.0 * (q[0] * dir[0] + q[1] * dir[1] - q[2] * dir[2]);
    let c = q[0] * q[0] + q[1] * q[1] - q[2] * q[2];
    let coef_scale = 1.0 + dot(q, q);
    if a.abs() <= 1e-12 && b.abs() <= 1e-12 * coef_scale.sqrt() && c.abs() <= 1e-12 * coef_scale {
        return Err(TangenciaError::ApolloniusDegenerate(
            "inputs share a common tangency point".into(),
        ));
    }
    let mut roots = Vec::with_capacity(2);
    if a.abs() <= 1e-14 {
        if b.abs() > 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= -1e-14 * (b * b).max(1e-300) {
            let sq = disc.max(0.0).sqrt();
            // stable quadratic roots
            let t = -0.5 * (b + b.signum() * sq);
            if t != 0.0 {
                roots.push(t / a);
                roots.push(c / t);
            } else {
                roots.push(-b / (2.0 * a));
            }
        }
    }

    let mut out: Vec<Circle> = Vec::new();
    for s in roots {
        let mut z = [p[0] + s * dir[0], p[1] + s * dir[1], p[2] + s * dir[2]];
        polish(&mut z, &gs);
        if !(z[2] > 1e-12 * scale) || !z.iter().all(|v| v.is_finite()) {
            continue;
        }
        let cand = Circle::new(z[0], z[1], z[2])?;
        let dup = out
            .iter()
            .any(|o| dist(o.center(), cand.center()) + (o.radius() - cand.radius()).abs() <= 1e-9 * scale);
        if !dup {
            out.push(cand);
        }
    }
    Ok(out)
}

/// Newton iterations on `|x - x_i|^2 - (r - r_i)^2 = 0`.
fn polish(z: &mut [f64; 3], gs: &[Circle; 3]) {
    for _ in 0..8 {
        let mut jac = [[0.0; 3]; 3];
        let mut f = [0.0; 3];
        for (i, g) in gs.iter().enumerate() {
            let (dx, dy, dr) = (z[0] - g.x(), z[1] - g.y(), z[2] - g.radius());
            f[i] = dx * dx + dy * dy - dr * dr;
            jac[i] = [2.0 * dx, 2.0 * dy, -2.0 * dr];
        }
        let Some(step) = solve3(jac, f) else { return };
        let next = [z[0] - step[0], z[1] - step[1], z[2] - step[2]];
        if !next.iter().all(|v| v.is_finite()) {
            return;
        }
        let done = step.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-16;
        *z = next;
        if done {
            return;
        }
    }
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = dot(m[0], cross(m[1], m[2]));
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    let col = |k: usize| [m[0][k], m[1][k], m[2][k]];
    let (c0, c1, c2) = (col(0), col(1), col(2));
    let d = dot(c0, cross(c1, c2));
    Some([
        dot(b, cross(c1, c2)) / d,
        dot(c0, cross(b, c2)) / d,
        dot(c0, cross(c1, b)) / d,
    ])
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
