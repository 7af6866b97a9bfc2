use crate::error::{Error, Result};

/// Gap guard: the model is singular at u = -1, fail fast before the
/// logarithm blows up.
pub const EPS_GAP: f64 = 1e-6;

/// Uniform grid on [-1, 1] with an odd number of nodes so that z = 0 is a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidConfig {
                key: "grid_n".into(),
                reason: format!("node count must be odd and >= 3, got {n}"),
            });
        }
        Ok(Grid { n, h: 2.0 / (n - 1) as f64 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node i. Computed as (2i - m)/m so that node(m - i) == -node(i) bitwise.
    pub fn node(&self, i: usize) -> f64 {
        let m = (self.n - 1) as f64;
        (2.0 * i as f64 - m) / m
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Next refinement with the same endpoints: n -> 2n - 1.
    pub fn refined(&self) -> Grid {
        Grid { n: 2 * self.n - 1, h: self.h / 2.0 }
    }
}

/// Discretized film displacement u(z) with Dirichlet ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Grid,
    values: Vec<f64>,
}

impl Profile {
    /// A profile with u(+-1) = 0 enforced.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidConfig {
                key: "profile".into(),
                reason: format!("{} values on a {}-node grid", values.len(), grid.n()),
            });
        }
        let n = values.len();
        if values[0] != 0.0 || values[n - 1] != 0.0 {
            return Err(Error::InvalidConfig {
                key: "profile".into(),
                reason: "Dirichlet ends u(+-1) = 0 violated".into(),
            });
        }
        Ok(Profile { grid, values })
    }

    /// Skips the Dirichlet-end check; used for constant test profiles in the
    /// potential solver's verification mode.
    pub fn new_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.n());
        Profile { grid, values }
    }

    pub fn flat(grid: Grid) -> Self {
        Profile { grid, values: vec![0.0; grid.n()] }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Profile { grid, values: vec![value; grid.n()] }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Checks -1 + eps < u < 1 - eps at every node.
    pub fn check_admissible(&self, eps: f64) -> Result<()> {
        for (i, &u) in self.values.iter().enumerate() {
            if !(u + 1.0 > eps) || !(1.0 - u > eps) || !u.is_finite() {
                return Err(Error::SingularGap { node: i, eps });
            }
        }
        Ok(())
    }

    /// max_i |u_i - u_{n-1-i}|.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2)
            .map(|i| (self.values[i] - self.values[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// max-norm distance to another profile on the same grid.
    pub fn max_distance(&self, other: &Profile) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Centered slope at node i, second-order one-sided at the endpoints.
    pub fn slope(&self, i: usize) -> f64 {
        slope_at(&self.values, self.grid.h(), i)
    }
}

/// Centered difference, second-order one-sided at the ends.
pub fn slope_at(v: &[f64], h: f64, i: usize) -> f64 {
    let n = v.len();
    if i == 0 {
        (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    } else if i == n - 1 {
        (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
    } else {
        (v[i + 1] - v[i - 1]) / (2.0 * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_even_or_tiny() {
        assert!(Grid::uniform(4).is_err());
        assert!(Grid::uniform(1).is_err());
        assert!(Grid::uniform(3).is_ok());
    }

    #[test]
    fn nodes_are_symmetric_and_hit_endpoints() {
        let g = Grid::uniform(401).unwrap();
        assert_eq!(g.node(0), -1.0);
        assert_eq!(g.node(400), 1.0);
        assert_eq!(g.node(200), 0.0);
        for i in 0..401 {
            assert_eq!(g.node(i), -g.node(400 - i));
        }
    }

    #[test]
    fn profile_checks_ends() {
        let g = Grid::uniform(5).unwrap();
        assert!(Profile::new(g, vec![0.1, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(Profile::new(g, vec![0.0, -0.1, -0.2, -0.1, 0.0]).is_ok());
    }

    #[test]
    fn admissibility_guard_trips_near_touchdown() {
        let g = Grid::uniform(5).unwrap();
        let p = Profile::new(g, vec![0.0, -0.9999999, 0.0, 0.0, 0.0]).unwrap();
        assert!(p.check_admissible(EPS_GAP).is_err());
    }
}
