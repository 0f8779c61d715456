use num_complex::Complex64;

use crate::error::{BkvgError, Result};

/// Graded mesh on [0, 1].
///
/// Nodes are `x(s)` at integer `s = 0..=N` for the smooth map
/// `s(x) = x/h_u + ln(1 + a·x/b)/a` with `a = −ln(grading_ratio)`: near 0
/// consecutive cells shrink by `grading_ratio` down to a floor of order
/// `b`, away from 0 they have width `h_u`. `grading_ratio = 1` is uniform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshSpec {
    /// Number of nodes including both endpoints.
    pub node_count: usize,
    pub grading_ratio: f64,
    /// Unknowns live on interior nodes; endpoint values are zero.
    pub interior_dirichlet: bool,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            node_count: 2000,
            grading_ratio: 0.85,
            interior_dirichlet: true,
        }
    }
}

/// Smallest cell floor used near 0.
pub const MIN_FLOOR: f64 = 1e-10;

impl MeshSpec {
    pub fn new(node_count: usize, grading_ratio: f64) -> Result<Self> {
        let spec = Self {
            node_count,
            grading_ratio,
            interior_dirichlet: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 16 {
            return Err(BkvgError::InvalidMesh(format!(
                "node_count {} < 16",
                self.node_count
            )));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio <= 1.0) {
            return Err(BkvgError::InvalidMesh(format!(
                "grading_ratio {} outside (0, 1]",
                self.grading_ratio
            )));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Mesh> {
        self.validate()?;
        let cells = self.node_count - 1;
        let n = cells as f64;
        let a = -self.grading_ratio.ln();
        let map = if a == 0.0 {
            GradingMap {
                a,
                b: 1.0,
                h_u: 1.0 / n,
            }
        } else {
            // Keep the geometric layer within a quarter of the cells.
            let b = if a * n / 4.0 > 700.0 {
                MIN_FLOOR
            } else {
                MIN_FLOOR.max(a / (a * n / 4.0).exp_m1())
            };
            let layer = (a / b).ln_1p() / a;
            let h_u = 1.0 / (n - layer);
            if !(h_u > 0.0) || !h_u.is_finite() {
                return Err(BkvgError::InvalidMesh(format!(
                    "{} nodes cannot accommodate grading ratio {}",
                    self.node_count, self.grading_ratio
                )));
            }
            GradingMap { a, b, h_u }
        };
        Ok(Mesh::from_map(*self, map, cells, 1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct GradingMap {
    a: f64,
    b: f64,
    h_u: f64,
}

impl GradingMap {
    fn x_of_s(&self, s: f64, s_max: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= s_max {
            return 1.0;
        }
        if self.a == 0.0 {
            return s * self.h_u;
        }
        let (a, b, h_u) = (self.a, self.b, self.h_u);
        // In y = ln(1 + a x / b) the map is convex and increasing; Newton
        // from the right end converges monotonically.
        let mut y = (a / b).ln_1p();
        for _ in 0..200 {
            let e = y.exp_m1();
            let f = b * e / (a * h_u) + y / a - s;
            let df = b * (e + 1.0) / (a * h_u) + 1.0 / a;
            let step = f / df;
            y -= step;
            if step.abs() <= 4.0 * f64::EPSILON * y.abs() {
                break;
            }
        }
        (b * y.exp_m1() / a).clamp(0.0, 1.0)
    }

    fn dx_ds(&self, x: f64) -> f64 {
        if self.a == 0.0 {
            self.h_u
        } else {
            1.0 / (1.0 / self.h_u + 1.0 / (self.a * x + self.b))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    spec: MeshSpec,
    map: GradingMap,
    /// Map parameter step between consecutive nodes (1 for the base mesh).
    step: f64,
    nodes: Vec<f64>,
}

impl Mesh {
    fn from_map(spec: MeshSpec, map: GradingMap, cells: usize, step: f64) -> Self {
        let s_max = (spec.node_count - 1) as f64;
        let nodes = (0..=cells)
            .map(|i| map.x_of_s(i as f64 * step, s_max))
            .collect();
        Self {
            spec,
            map,
            step,
            nodes,
        }
    }

    pub fn spec(&self) -> &MeshSpec {
        &self.spec
    }

    /// All nodes, `0 = x₀ < … < x_N = 1`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    /// Same map with every cell halved; node `2i` coincides with node `i`.
    pub fn refined(&self) -> Mesh {
        Mesh::from_map(self.spec, self.map, 2 * self.cells(), 0.5 * self.step)
    }

    /// Composite Simpson rule in the map parameter for nodal values of an
    /// integrand (3/8 rule on the last three cells when the count is odd).
    pub fn integrate_nodal(&self, values: &[Complex64]) -> Complex64 {
        assert_eq!(values.len(), self.nodes.len(), "one value per node");
        let n = self.cells();
        let g: Vec<Complex64> = values
            .iter()
            .zip(&self.nodes)
            .map(|(v, &x)| v * self.map.dx_ds(x) * self.step)
            .collect();
        let simpson_end = if n.is_multiple_of(2) { n } else { n - 3 };
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..simpson_end).step_by(2) {
            acc += (g[k] + g[k + 1] * 4.0 + g[k + 2]) / 3.0;
        }
        if simpson_end < n {
            let k = simpson_end;
            acc += (g[k] + g[k + 1] * 3.0 + g[k + 2] * 3.0 + g[k + 3]) * 0.375;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_increase_and_grade_toward_zero() {
        let mesh = MeshSpec::default().build().unwrap();
        let x = mesh.nodes();
        assert_eq!(x.len(), 2000);
        assert_eq!(x[0], 0.0);
        assert_eq!(*x.last().unwrap(), 1.0);
        assert!(x.windows(2).all(|w| w[1] > w[0]));
        assert!(x[1] < 1e-9, "first node {}", x[1]);
        // Geometric layer: consecutive cell ratio ≈ 0.85.
        let k = 60;
        let ratio = (x[k] - x[k - 1]) / (x[k + 1] - x[k]);
        assert!((ratio - 0.85).abs() < 0.01, "ratio {ratio}");
        // Uniform part: cells of nearly equal width.
        let h1 = x[1900] - x[1899];
        let h2 = x[1999] - x[1998];
        assert!((h1 / h2 - 1.0).abs() < 0.01);
    }

    #[test]
    fn uniform_when_ratio_is_one() {
        let mesh = MeshSpec::new(17, 1.0).unwrap().build().unwrap();
        for (i, x) in mesh.nodes().iter().enumerate() {
            assert!((x - i as f64 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn small_meshes_stay_valid() {
        for n in [16, 17, 40, 121, 500] {
            let mesh = MeshSpec::new(n, 0.85).unwrap().build().unwrap();
            assert!(mesh.nodes().windows(2).all(|w| w[1] > w[0]));
        }
        assert!(MeshSpec::new(15, 0.85).is_err());
        assert!(MeshSpec::new(100, 0.0).is_err());
        assert!(MeshSpec::new(100, 1.5).is_err());
    }

    #[test]
    fn refinement_nests() {
        let mesh = MeshSpec::new(101, 0.85).unwrap().build().unwrap();
        let fine = mesh.refined();
        assert_eq!(fine.cells(), 200);
        for (i, x) in mesh.nodes().iter().enumerate() {
            assert_eq!(fine.nodes()[2 * i], *x);
        }
    }

    #[test]
    fn simpson_integrates_singular_power() {
        for n in [2000, 2001] {
            let mesh = MeshSpec::new(n, 0.85).unwrap().build().unwrap();
            let v: Vec<Complex64> = mesh
                .nodes()
                .iter()
                .map(|&x| Complex64::new(x.powf(0.3), x.powf(2.5)))
                .collect();
            let got = mesh.integrate_nodal(&v);
            assert!((got.re - 1.0 / 1.3).abs() < 1e-9, "{got}");
            assert!((got.im - 1.0 / 3.5).abs() < 1e-9);
        }
    }
}
