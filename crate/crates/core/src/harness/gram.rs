use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::generator::GeneratedSystem;
use crate::quadrature::{integrate_dd_best_effort, QuadratureSpec};
use crate::report::{num, nums, Report};

#[derive(Clone, Debug)]
pub struct GramReport {
    pub size: usize,
    pub matrix: Vec<Vec<f64>>,
    pub max_offdiag_abs: f64,
    pub diag: Vec<f64>,
    pub est_quad_error: f64,
    /// False when the quadrature missed its tolerance; entries are best effort.
    pub converged: bool,
}

impl GramReport {
    fn from_matrix(matrix: Vec<Vec<f64>>, est_quad_error: f64, converged: bool) -> Self {
        let size = matrix.len();
        let diag = (0..size).map(|i| matrix[i][i]).collect();
        let mut max_offdiag_abs: f64 = 0.0;
        for (i, row) in matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i != j {
                    max_offdiag_abs = max_offdiag_abs.max(v.abs());
                }
            }
        }
        GramReport { size, matrix, max_offdiag_abs, diag, est_quad_error, converged }
    }

    pub fn max_diag(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// `max |G_mn|` over `m ≠ n`, relative to the largest diagonal entry.
    pub fn relative_offdiag(&self) -> f64 {
        self.max_offdiag_abs / self.max_diag()
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.size {
            for j in 0..self.size {
                d = d.max((self.matrix[i][j] - self.matrix[j][i]).abs());
            }
        }
        d
    }

    /// The Gram matrix of the members scaled by `factors[n]`.
    pub fn scaled(&self, factors: &[f64]) -> Self {
        let m = (0..self.size)
            .map(|i| (0..self.size).map(|j| self.matrix[i][j] * factors[i] * factors[j]).collect())
            .collect();
        let top = factors.iter().fold(0.0f64, |m, f| m.max(f * f));
        GramReport::from_matrix(m, self.est_quad_error * top, self.converged)
    }

    pub fn to_report(&self, kind: &str, pass: bool) -> Report {
        let mut r = Report::new(kind).input("size", self.size);
        r.values = nums(&self.diag);
        r.residuals = nums(&[self.max_offdiag_abs, self.relative_offdiag(), self.symmetry_defect()]);
        r.quad_error = num(self.est_quad_error);
        r.pass = pass;
        r
    }
}

/// Relative evaluation noise of members along deep paths; panel errors below
/// this fraction of the panel's absolute mass are accepted.
pub const MEMBER_NOISE_FLOOR: f64 = 1e-11;

/// Inner products `⟨f_m^{path}, f_n^{path}⟩` for `m, n ≤ n_max`, all from one
/// vector-valued adaptive quadrature over `[a, a + 2l]`.
pub fn gram_matrix(sys: &GeneratedSystem, n_max: usize, spec: &QuadratureSpec) -> Result<GramReport> {
    if n_max < 1 {
        return Err(Error::Invalid("a Gram report needs N ≥ 1".into()));
    }
    let (a, b) = sys.interval();
    let mut kinks = sys.kink_points()?;
    kinks.extend(spec.kink_hints.iter().copied());
    let spec = QuadratureSpec { kink_hints: kinks, noise_floor: spec.noise_floor.max(MEMBER_NOISE_FLOOR), ..spec.clone() };
    let size = n_max + 1;
    let q = integrate_dd_best_effort(
        |t: Dd| {
            let f = sys.members_dd(n_max, t).expect("member evaluation inside the interval");
            let mut out = Vec::with_capacity(size * (size + 1) / 2);
            for i in 0..size {
                for j in i..size {
                    out.push(f[i] * f[j]);
                }
            }
            out
        },
        Dd::from(a),
        Dd::from(b),
        &spec,
    )?;
    let mut matrix = vec![vec![0.0; size]; size];
    let mut idx = 0;
    for i in 0..size {
        for j in i..size {
            matrix[i][j] = q.value[idx];
            matrix[j][i] = q.value[idx];
            idx += 1;
        }
    }
    Ok(GramReport::from_matrix(matrix, q.error, q.converged))
}
