//! Sturm-Liouville machinery for the linearization at catenoids: the shooting
//! function D(c, mu), eigenpairs with node certification, eigencurves, and a
//! matrix-discretization spectrum used as an independent oracle and as the
//! stability classifier for perturbed linearizations.
//!
//! The underlying problem is
//!   0 = mu v - c^2 v / cosh^2(cz) - d/dz( v_z / cosh^2(cz) ),  v(+-1) = 0,
//! integrated in the flux variables (v, w) with w = v_z / cosh^2(cz) so that
//! the right-hand side stays smooth and bounded for all c.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{sym_tridiag_top_eigenvalues, Tridiagonal};

/// One shot of the initial value problem from z = -1 with v(-1) = 0,
/// v_z(-1) = 1; `d` is the terminal value v(1).
#[derive(Debug, Clone)]
pub struct ShotResult {
    pub c: f64,
    pub mu: f64,
    pub d: f64,
    /// v at the grid nodes.
    pub v: Vec<f64>,
    /// v_z at the grid nodes.
    pub dv: Vec<f64>,
}

/// Eigenvalue mu_n with its max-norm normalized eigenfunction samples and the
/// certified interior node count.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub index: usize,
    pub mu: f64,
    pub v: Vec<f64>,
    pub nodes: usize,
}

#[inline]
fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// Classical RK4 with fixed step h over the grid, in the flux form
/// v' = cosh^2(cz) w,  w' = (mu - c^2 / cosh^2(cz)) v.
pub fn shoot(c: f64, mu: f64, grid: Grid) -> ShotResult {
    assert!(c > 0.0);
    let n = grid.n();
    let h = grid.h();
    let rhs = |z: f64, v: f64, w: f64| -> (f64, f64) {
        let p = sech2(c * z);
        (w / p, (mu - c * c * p) * v)
    };
    let mut v = vec![0.0; n];
    let mut dv = vec![0.0; n];
    let mut y = (0.0, sech2(c)); // v(-1) = 0, w(-1) = p(-1) * v_z(-1) = sech^2(c)
    v[0] = 0.0;
    dv[0] = 1.0;
    for i in 0..n - 1 {
        let z = grid.node(i);
        let (k1v, k1w) = rhs(z, y.0, y.1);
        let (k2v, k2w) = rhs(z + 0.5 * h, y.0 + 0.5 * h * k1v, y.1 + 0.5 * h * k1w);
        let (k3v, k3w) = rhs(z + 0.5 * h, y.0 + 0.5 * h * k2v, y.1 + 0.5 * h * k2w);
        let (k4v, k4w) = rhs(z + h, y.0 + h * k3v, y.1 + h * k3w);
        y.0 += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        y.1 += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        v[i + 1] = y.0;
        dv[i + 1] = y.1 / sech2(c * grid.node(i + 1));
    }
    ShotResult { c, mu, d: v[n - 1], v, dv }
}

/// Closed-form D(c, 0) from the fundamental system {sinh(cz), cz sinh(cz) - cosh(cz)}
/// fitted to v(-1) = 0, v_z(-1) = 1. Test oracle for the integrator.
pub fn shoot_mu0_closed_form(c: f64) -> f64 {
    let (s, ch) = (c.sinh(), c.cosh());
    -2.0 * s * (c * s - ch) / (c * ch * ch)
}

/// Strict sign changes of the interior samples, ignoring |v| <= 1e-12.
pub fn interior_node_count(v: &[f64]) -> usize {
    let n = v.len();
    let mut count = 0;
    let mut last = 0.0f64;
    for &x in &v[1..n - 1] {
        if x.abs() <= 1e-12 {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            count += 1;
        }
        last = x;
    }
    count
}

fn bisect_d_root(c: f64, mut lo: f64, mut hi: f64, d_lo: f64, grid: Grid) -> f64 {
    // lo > hi in mu (scan runs downward); keep orientation explicit
    debug_assert!(lo > hi);
    let mut sign_lo = d_lo.signum();
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let dm = shoot(c, mid, grid).d;
        if dm == 0.0 {
            return mid;
        }
        if dm.signum() == sign_lo {
            lo = mid;
            sign_lo = dm.signum();
        } else {
            hi = mid;
        }
        if (lo - hi).abs() < 1e-12 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Scans D(c, .) downward over (mu_lo, mu_hi) with a fixed step, bisecting
/// every sign change into `out` (kept sorted by descending mu, deduplicated).
/// Stops early once the node-count sequence 0, 1, ..., want_nodes is present
/// without gaps.
fn scan_interval(
    c: f64,
    mu_hi: f64,
    mu_lo: f64,
    step: f64,
    grid: Grid,
    want_nodes: usize,
    out: &mut Vec<(f64, usize)>,
) {
    let mut mu_prev = mu_hi;
    let mut d_prev = shoot(c, mu_prev, grid).d;
    let mut mu = mu_hi;
    while mu > mu_lo {
        mu = (mu - step).max(mu_lo);
        let d = shoot(c, mu, grid).d;
        if d_prev.signum() != d.signum() && d_prev != 0.0 {
            let root = bisect_d_root(c, mu_prev, mu, d_prev, grid);
            if out.iter().all(|&(m, _)| (m - root).abs() > 1e-9) {
                let nodes = interior_node_count(&shoot(c, root, grid).v);
                out.push((root, nodes));
                out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            }
            if first_node_gap(out, mu_hi, want_nodes).is_none()
                && out.iter().any(|&(_, k)| k >= want_nodes)
            {
                return;
            }
        }
        mu_prev = mu;
        d_prev = d;
    }
}

/// First mu-interval (upper, lower) inside which the descending node-count
/// sequence skips a value at or below `want_nodes`; None when the sequence
/// 0, 1, 2, ... is gap-free that far.
fn first_node_gap(roots: &[(f64, usize)], mu_hi: f64, want_nodes: usize) -> Option<(f64, f64)> {
    let mut expected = 0usize;
    let mut upper = mu_hi;
    for &(m, n) in roots {
        if n > expected {
            return Some((upper, m));
        }
        if n >= want_nodes {
            return None;
        }
        expected = n + 1;
        upper = m;
    }
    None
}

/// All roots of D(c, .) in (mu_lo, mu_hi): a coarse downward scan followed by
/// progressively finer rescans of any interval where the node counts of
/// adjacent roots reveal a stepped-over root pair (D dips through zero and
/// back within one coarse step there).
fn collect_roots(
    c: f64,
    mu_hi: f64,
    mu_lo: f64,
    step: f64,
    grid: Grid,
    want_nodes: usize,
) -> Vec<(f64, usize)> {
    let mut roots = Vec::new();
    scan_interval(c, mu_hi, mu_lo, step, grid, want_nodes, &mut roots);
    let mut step = step;
    while step > 1e-6 {
        let Some((hi, lo)) = first_node_gap(&roots, mu_hi, want_nodes) else {
            break;
        };
        step /= 8.0;
        let before = roots.len();
        scan_interval(c, hi - 1e-9, lo + 1e-9, step, grid, want_nodes, &mut roots);
        if roots.len() == before && step <= 1e-6 {
            break;
        }
    }
    roots
}

/// The n-th eigenpair (n = 0 is the principal eigenvalue), found by scanning
/// D(c, .) downward from the coefficient bound mu <= c^2 and certifying the
/// interior node count of the trace.
pub fn eigenvalue(c: f64, n: usize, grid: Grid) -> Result<EigenPair> {
    assert!(c > 0.0);
    let mu_hi = c * c + 0.5;
    let mu_lo = mu_hi - 400.0;
    let roots = collect_roots(c, mu_hi, mu_lo, 0.25, grid, n);
    let found = roots
        .iter()
        .find(|&&(_, nodes)| nodes == n)
        .copied()
        .ok_or_else(|| Error::NotBracketed {
            what: format!("eigenvalue index {n} at c = {c} in mu window [{mu_lo}, {mu_hi}]"),
        })?;
    let shot = shoot(c, found.0, grid);
    // normalize to max-norm 1 with a positive peak
    let mut peak = 0.0f64;
    for &x in &shot.v {
        if x.abs() > peak.abs() {
            peak = x;
        }
    }
    let v: Vec<f64> = shot.v.iter().map(|&x| x / peak).collect();
    Ok(EigenPair { index: n, mu: found.0, v, nodes: found.1 })
}

/// Samples of the eigencurve c -> mu_n(c).
pub fn eigencurve(
    c_lo: f64,
    c_hi: f64,
    n: usize,
    samples: usize,
    grid: Grid,
) -> Result<Vec<(f64, f64)>> {
    assert!(0.0 < c_lo && c_lo < c_hi && samples >= 2);
    let mut out = Vec::with_capacity(samples);
    for k in 0..samples {
        let c = c_lo + (c_hi - c_lo) * k as f64 / (samples - 1) as f64;
        out.push((c, eigenvalue(c, n, grid)?.mu));
    }
    Ok(out)
}

/// Locates the single zero of the principal eigencurve by bisection on c and
/// returns (c_zero, centered-difference slope of mu_0 there).
pub fn first_eigencurve_zero(c_lo: f64, c_hi: f64, grid: Grid) -> Result<(f64, f64)> {
    let mu_at = |c: f64| -> Result<f64> { Ok(eigenvalue(c, 0, grid)?.mu) };
    let mut a = c_lo;
    let mut b = c_hi;
    let mut fa = mu_at(a)?;
    let fb = mu_at(b)?;
    if fa.signum() == fb.signum() {
        return Err(Error::NotBracketed {
            what: format!("mu_0 sign change on [{c_lo}, {c_hi}]"),
        });
    }
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        let fm = mu_at(m)?;
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a).abs() < 1e-9 {
            break;
        }
    }
    let c0 = 0.5 * (a + b);
    let dc = 1e-4;
    let slope = (mu_at(c0 + dc)? - mu_at(c0 - dc)?) / (2.0 * dc);
    Ok((c0, slope))
}

/// The k largest eigenvalues of a tridiagonal operator whose off-diagonal
/// products are positive (true for the flux-form discretizations used here),
/// via diagonal symmetrization and Sturm-sequence bisection.
pub fn matrix_spectrum(op: &Tridiagonal, k: usize) -> Result<Vec<f64>> {
    let (d, e) = op.symmetrize().ok_or_else(|| Error::NoConvergence {
        what: "matrix_spectrum: operator not symmetrizable (off-diagonal product <= 0)".into(),
        iterations: 0,
    })?;
    Ok(sym_tridiag_top_eigenvalues(&d, &e, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::solve_c_crit;

    fn grid801() -> Grid {
        Grid::uniform(801).unwrap()
    }

    #[test]
    fn shot_initial_data_is_exact() {
        let s = shoot(1.5, -0.7, grid801());
        assert_eq!(s.v[0], 0.0);
        assert_eq!(s.dv[0], 1.0);
    }

    #[test]
    fn d_vanishes_at_c_crit_mu_zero() {
        let c = solve_c_crit();
        assert!(shoot(c, 0.0, grid801()).d.abs() <= 1e-8);
    }

    #[test]
    fn closed_form_mu0_oracle() {
        for &c in &[0.6, 1.0, 2.0, 3.0] {
            let d = shoot(c, 0.0, grid801()).d;
            let exact = shoot_mu0_closed_form(c);
            assert!((d - exact).abs() <= 1e-8, "c = {c}: {d} vs {exact}");
        }
    }

    #[test]
    fn rk4_self_convergence_order() {
        let c = 1.7;
        let mu = -0.9;
        let mut prev_err: Option<f64> = None;
        let d_fine = shoot(c, mu, Grid::uniform(6401).unwrap()).d;
        for &n in &[101usize, 201, 401] {
            let d = shoot(c, mu, Grid::uniform(n).unwrap()).d;
            let err = (d - d_fine).abs();
            if let Some(p) = prev_err {
                assert!(p / err > 12.0, "ratio {} at n = {n}", p / err);
            }
            prev_err = Some(err);
        }
    }

    #[test]
    fn principal_eigenvalue_at_c_crit_is_zero() {
        let c = solve_c_crit();
        let ep = eigenvalue(c, 0, grid801()).unwrap();
        assert!(ep.mu.abs() < 1e-6, "mu_0(c_crit) = {}", ep.mu);
        assert_eq!(ep.nodes, 0);
        // eigenfunction proportional to c z sinh(cz) - cosh(cz)
        let g = grid801();
        let exact: Vec<f64> = g.nodes().map(|z| c * z * (c * z).sinh() - (c * z).cosh()).collect();
        let scale = exact.iter().cloned().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        for (i, &v) in ep.v.iter().enumerate() {
            assert!((v - exact[i] / scale).abs() < 1e-6);
        }
    }

    #[test]
    fn eigenfunction_parity() {
        let g = grid801();
        let n = g.n();
        for &(c, idx) in &[(2.1268f64, 0usize), (2.1268, 1), (0.9, 0), (0.9, 1)] {
            let ep = eigenvalue(c, idx, g).unwrap();
            let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..n {
                let e = (ep.v[i] - sign * ep.v[n - 1 - i]).abs();
                assert!(e < 1e-8, "parity error {e} at c={c}, idx={idx}");
            }
        }
    }

    #[test]
    fn d_vanishes_at_computed_eigenvalues() {
        let g = grid801();
        let ep = eigenvalue(1.4, 1, g).unwrap();
        assert!(shoot(1.4, ep.mu, g).d.abs() <= 1e-8);
    }

    #[test]
    fn d_mu_slope_positive_on_principal_curve() {
        let g = grid801();
        for &c in &[0.8, 1.2, 2.0, 3.0] {
            let mu0 = eigenvalue(c, 0, g).unwrap().mu;
            let dmu = 1e-5;
            let slope = (shoot(c, mu0 + dmu, g).d - shoot(c, mu0 - dmu, g).d) / (2.0 * dmu);
            assert!(slope > 0.0, "d_mu D <= 0 at c = {c}");
        }
    }
}
