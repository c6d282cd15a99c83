//! Matrix-valued potentials, their admissible single-unknown classes and the
//! sampled scalar profiles that parameterize them.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in 3-space.
pub type Point = [f64; 3];

/// A real 2×2 matrix, row-major.
pub type Mat2 = [[f64; 2]; 2];

/// The receiver focus `e = (1, 0, 0)` of the separated geometry.
pub const FOCUS: Point = [1.0, 0.0, 0.0];

pub fn norm(x: &Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// `|x| + |x - e|`, the confocal-ellipsoid parameter.
pub fn ellipsoidal_sum(x: &Point) -> f64 {
    let d = [x[0] - FOCUS[0], x[1] - FOCUS[1], x[2] - FOCUS[2]];
    norm(x) + norm(&d)
}

/// The constant source-amplitude vector `(1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CouplingVector;

impl CouplingVector {
    pub const fn components(self) -> [f64; 2] {
        [1.0, 1.0]
    }

    pub fn dot(self, v: [f64; 2]) -> f64 {
        v[0] + v[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    /// `r = |x|`, domain `r >= 0`.
    Radius,
    /// `s = |x| + |x - e|`, domain `s >= 1`.
    EllipsoidalSum,
}

impl ParameterKind {
    pub fn lower_bound(self) -> f64 {
        match self {
            ParameterKind::Radius => 0.0,
            ParameterKind::EllipsoidalSum => 1.0,
        }
    }

    pub fn symmetry(self) -> Symmetry {
        match self {
            ParameterKind::Radius => Symmetry::Radial,
            ParameterKind::EllipsoidalSum => Symmetry::Ellipsoidal,
        }
    }

    /// The parameter value of the spatial point `x`.
    pub fn parameter_of(self, x: &Point) -> f64 {
        match self {
            ParameterKind::Radius => norm(x),
            ParameterKind::EllipsoidalSum => ellipsoidal_sum(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Linear,
    CubicHermite,
}

/// A sampled scalar profile `b(·)` of either the radius or the ellipsoidal sum.
///
/// Evaluation outside the sampled range extends by the nearest endpoint value.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProfile {
    kind: ParameterKind,
    params: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    interpolation: Interpolation,
}

impl ScalarProfile {
    pub fn new(
        kind: ParameterKind,
        samples: Vec<(f64, f64)>,
        interpolation: Interpolation,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidProfile("no samples".into()));
        }
        let (params, values): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        if params.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        if params[0] < kind.lower_bound() - 1e-12 {
            return Err(Error::InvalidProfile(format!(
                "parameter {} below the domain bound {}",
                params[0],
                kind.lower_bound()
            )));
        }
        if let Some(i) = params.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile(format!(
                "parameters not strictly increasing at index {}",
                i + 1
            )));
        }
        let slopes = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::CubicHermite => pchip_slopes(&params, &values),
        };
        Ok(Self {
            kind,
            params,
            values,
            slopes,
            interpolation,
        })
    }

    /// Samples `f` on `grid` (strictly increasing).
    pub fn from_fn<F: Fn(f64) -> f64>(
        kind: ParameterKind,
        grid: &[f64],
        f: F,
        interpolation: Interpolation,
    ) -> Result<Self> {
        Self::new(
            kind,
            grid.iter().map(|&p| (p, f(p))).collect(),
            interpolation,
        )
    }

    pub fn constant(kind: ParameterKind, value: f64) -> Self {
        Self::new(
            kind,
            vec![(kind.lower_bound(), value)],
            Interpolation::Linear,
        )
        .expect("single finite sample is a valid profile")
    }

    pub fn kind(&self) -> ParameterKind {
        self.kind
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.params.iter().copied().zip(self.values.iter().copied())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.params[0], *self.params.last().unwrap())
    }

    pub fn with_interpolation(&self, interpolation: Interpolation) -> Self {
        Self::new(self.kind, self.samples().collect(), interpolation)
            .expect("re-interpolating a valid profile")
    }

    /// Evaluates the profile at parameter value `p`.
    pub fn eval(&self, p: f64) -> f64 {
        let n = self.params.len();
        if n == 1 || p <= self.params[0] {
            return self.values[0];
        }
        if p >= self.params[n - 1] {
            return self.values[n - 1];
        }
        // index of the interval [params[i], params[i+1]] containing p
        let i = self.params.partition_point(|&q| q <= p) - 1;
        let (x0, x1) = (self.params[i], self.params[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let h = x1 - x0;
        let t = (p - x0) / h;
        match self.interpolation {
            Interpolation::Linear => y0 + t * (y1 - y0),
            Interpolation::CubicHermite => {
                let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
                let t2 = t * t;
                let t3 = t2 * t;
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
            }
        }
    }

    /// Reads a two-column `parameter,value` CSV; a header row is optional.
    pub fn read_csv<R: Read>(
        reader: R,
        kind: ParameterKind,
        interpolation: Interpolation,
    ) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut samples = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Format(format!("row {row}: expected two columns")));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(p), Ok(v)) => samples.push((p, v)),
                _ if row == 0 => continue, // header
                _ => return Err(Error::Format(format!("row {row}: non-numeric entry"))),
            }
        }
        Self::new(kind, samples, interpolation)
    }

    pub fn read_csv_path(
        path: impl AsRef<Path>,
        kind: ParameterKind,
        interpolation: Interpolation,
    ) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, kind, interpolation)
    }

    /// Writes the samples as `parameter,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header = match self.kind {
            ParameterKind::Radius => "r",
            ParameterKind::EllipsoidalSum => "s",
        };
        writeln!(w, "{header},b")?;
        for (p, v) in self.samples() {
            writeln!(w, "{p:.16e},{v:.16e}")?;
        }
        Ok(())
    }
}

/// Shape-preserving (PCHIP) slopes.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 1 {
        return vec![0.0];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a * b <= 0.0 {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// Which spatial symmetry a potential (or one of its entries) carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    None,
    Radial,
    Ellipsoidal,
}

/// Admissible class of a matrix potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    /// All four entries equal one unknown field.
    A1,
    /// Equal unknown diagonal, prescribed off-diagonal.
    A2,
    /// Equal unknown off-diagonal, prescribed diagonal.
    A3,
    General,
}

impl ClassTag {
    /// Positions (row, col) occupied by the single unknown field.
    pub fn unknown_pattern(self) -> Option<[[bool; 2]; 2]> {
        match self {
            ClassTag::A1 => Some([[true, true], [true, true]]),
            ClassTag::A2 => Some([[true, false], [false, true]]),
            ClassTag::A3 => Some([[false, true], [true, false]]),
            ClassTag::General => None,
        }
    }

    /// Number of entries carrying the unknown (the factor in `Σ_ij β_ij`).
    pub fn unknown_count(self) -> Option<usize> {
        self.unknown_pattern()
            .map(|p| p.iter().flatten().filter(|&&b| b).count())
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassTag::A1 => "A1",
            ClassTag::A2 => "A2",
            ClassTag::A3 => "A3",
            ClassTag::General => "General",
        };
        f.write_str(s)
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SpatialFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// One scalar entry `β_ij(x)` of a matrix potential.
#[derive(Clone)]
pub enum Field {
    Constant(f64),
    Profile(ScalarProfile),
    /// `x ↦ f(|x|)`.
    Radial(RealFn),
    /// `x ↦ f(|x| + |x - e|)`.
    Ellipsoidal(RealFn),
    General(SpatialFn),
    /// `Σ c_k f_k(x)`.
    Combination(Arc<Vec<(f64, Field)>>),
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Constant(c) => write!(f, "Constant({c})"),
            Field::Profile(p) => write!(f, "Profile({:?}, {} samples)", p.kind, p.params.len()),
            Field::Radial(_) => f.write_str("Radial(<fn>)"),
            Field::Ellipsoidal(_) => f.write_str("Ellipsoidal(<fn>)"),
            Field::General(_) => f.write_str("General(<fn>)"),
            Field::Combination(terms) => f.debug_list().entries(terms.iter()).finish(),
        }
    }
}

impl From<ScalarProfile> for Field {
    fn from(p: ScalarProfile) -> Self {
        Field::Profile(p)
    }
}

impl From<f64> for Field {
    fn from(c: f64) -> Self {
        Field::Constant(c)
    }
}

impl Field {
    pub fn radial<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Field::Radial(Arc::new(f))
    }

    pub fn ellipsoidal<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Field::Ellipsoidal(Arc::new(f))
    }

    pub fn general<F: Fn(&Point) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Field::General(Arc::new(f))
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            Field::Constant(c) => *c,
            Field::Profile(p) => p.eval(p.kind.parameter_of(x)),
            Field::Radial(f) => f(norm(x)),
            Field::Ellipsoidal(f) => f(ellipsoidal_sum(x)),
            Field::General(f) => f(x),
            Field::Combination(terms) => terms.iter().map(|(c, t)| c * t.eval(x)).sum(),
        }
    }

    /// Whether the field is invariant under the given symmetry.
    pub fn respects(&self, symmetry: Symmetry) -> bool {
        match (self, symmetry) {
            (_, Symmetry::None) | (Field::Constant(_), _) => true,
            (Field::Profile(p), s) => p.kind.symmetry() == s,
            (Field::Radial(_), Symmetry::Radial) => true,
            (Field::Ellipsoidal(_), Symmetry::Ellipsoidal) => true,
            (Field::Combination(terms), s) => terms.iter().all(|(_, t)| t.respects(s)),
            _ => false,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            Field::Constant(c) => *c == 0.0,
            Field::Profile(p) => p.values.iter().all(|&v| v == 0.0),
            Field::Combination(terms) => terms
                .iter()
                .all(|(c, t)| *c == 0.0 || t.is_identically_zero()),
            _ => false,
        }
    }

    pub fn linear_combination(a: f64, f: &Field, b: f64, g: &Field) -> Field {
        match (f, g) {
            (Field::Constant(x), Field::Constant(y)) => Field::Constant(a * x + b * y),
            _ => Field::Combination(Arc::new(vec![(a, f.clone()), (b, g.clone())])),
        }
    }
}

/// A 2×2 matrix potential with its class and symmetry tags.
#[derive(Debug, Clone)]
pub struct MatrixPotential {
    entries: [[Field; 2]; 2],
    class_tag: ClassTag,
    symmetry: Symmetry,
}

impl MatrixPotential {
    /// An unconstrained potential from four entries; every entry must respect
    /// `symmetry`.
    pub fn general(entries: [[Field; 2]; 2], symmetry: Symmetry) -> Result<Self> {
        check_symmetry(entries.iter().flatten(), symmetry)?;
        Ok(Self {
            entries,
            class_tag: ClassTag::General,
            symmetry,
        })
    }

    /// A constant General-class potential.
    pub fn constant(m: Mat2) -> Self {
        let e = |i: usize, j: usize| Field::Constant(m[i][j]);
        Self {
            entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
            class_tag: ClassTag::General,
            symmetry: Symmetry::Radial,
        }
    }

    pub fn zero(symmetry: Symmetry) -> Self {
        let z = || Field::Constant(0.0);
        Self {
            entries: [[z(), z()], [z(), z()]],
            class_tag: ClassTag::A1,
            symmetry,
        }
    }

    pub fn entries(&self) -> &[[Field; 2]; 2] {
        &self.entries
    }

    pub fn class_tag(&self) -> ClassTag {
        self.class_tag
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn eval_matrix(&self, x: &Point) -> Mat2 {
        let e = &self.entries;
        [
            [e[0][0].eval(x), e[0][1].eval(x)],
            [e[1][0].eval(x), e[1][1].eval(x)],
        ]
    }

    /// `(𝔓(x)·(1,1))_i = β_i1(x) + β_i2(x)`.
    pub fn row_sums(&self, x: &Point) -> [f64; 2] {
        let m = self.eval_matrix(x);
        [m[0][0] + m[0][1], m[1][0] + m[1][1]]
    }

    /// `Σ_ij β_ij(x)`.
    pub fn entry_sum(&self, x: &Point) -> f64 {
        let r = self.row_sums(x);
        r[0] + r[1]
    }

    /// Swaps the off-diagonal entries.
    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        Self {
            entries: [
                [e[0][0].clone(), e[1][0].clone()],
                [e[0][1].clone(), e[1][1].clone()],
            ],
            class_tag: self.class_tag,
            symmetry: self.symmetry,
        }
    }

    /// `a·self + b·other`, entrywise. The class tag survives when both inputs
    /// share it; symmetry survives when both inputs share it.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        let e = |i: usize, j: usize| {
            Field::linear_combination(a, &self.entries[i][j], b, &other.entries[i][j])
        };
        let class_tag = if self.class_tag == other.class_tag {
            self.class_tag
        } else {
            ClassTag::General
        };
        let symmetry = if self.symmetry == other.symmetry {
            self.symmetry
        } else if self.is_constant() {
            other.symmetry
        } else if other.is_constant() {
            self.symmetry
        } else {
            Symmetry::None
        };
        Self {
            entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
            class_tag,
            symmetry,
        }
    }

    /// `self - other`.
    pub fn difference(&self, other: &Self) -> Self {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        self.linear_combination(alpha, &Self::zero(self.symmetry), 0.0)
    }

    fn is_constant(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|f| matches!(f, Field::Constant(_)))
    }

    pub fn is_identically_zero(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(Field::is_identically_zero)
    }

    pub fn require_symmetry(&self, symmetry: Symmetry) -> Result<()> {
        if self.symmetry == symmetry {
            Ok(())
        } else {
            Err(Error::SymmetryMismatch(format!(
                "expected {symmetry:?} potential, got {:?}",
                self.symmetry
            )))
        }
    }
}

fn check_symmetry<'a>(fields: impl Iterator<Item = &'a Field>, symmetry: Symmetry) -> Result<()> {
    for f in fields {
        if !f.respects(symmetry) {
            return Err(Error::SymmetryMismatch(format!(
                "entry {f:?} does not have {symmetry:?} symmetry"
            )));
        }
    }
    Ok(())
}

/// Assembles an admissible-class potential from its single unknown field.
///
/// `prescribed` holds `(β12, β21)` for A2 and `(β11, β22)` for A3 and must be
/// absent for A1.
pub fn build_potential(
    class_tag: ClassTag,
    unknown: impl Into<Field>,
    prescribed: Option<[Field; 2]>,
    symmetry: Symmetry,
) -> Result<MatrixPotential> {
    let unknown = unknown.into();
    if let Field::Profile(p) = &unknown {
        if symmetry != Symmetry::None && p.kind.symmetry() != symmetry {
            return Err(Error::SymmetryMismatch(format!(
                "{:?} profile cannot build a {symmetry:?} potential",
                p.kind
            )));
        }
    }
    check_symmetry(std::iter::once(&unknown), symmetry)?;
    let entries = match (class_tag, prescribed) {
        (ClassTag::A1, None) => [
            [unknown.clone(), unknown.clone()],
            [unknown.clone(), unknown],
        ],
        (ClassTag::A1, Some(_)) => {
            return Err(Error::ClassMismatch(
                "A1 takes no prescribed entries".into(),
            ))
        }
        (ClassTag::A2, Some([b12, b21])) => {
            check_symmetry([&b12, &b21].into_iter(), symmetry)?;
            [[unknown.clone(), b12], [b21, unknown]]
        }
        (ClassTag::A3, Some([b11, b22])) => {
            check_symmetry([&b11, &b22].into_iter(), symmetry)?;
            [[b11, unknown.clone()], [unknown, b22]]
        }
        (ClassTag::A2 | ClassTag::A3, None) => {
            return Err(Error::ClassMismatch(format!(
                "{class_tag} requires two prescribed entries"
            )))
        }
        (ClassTag::General, _) => {
            return Err(Error::ClassMismatch(
                "General potentials have four unknowns; use MatrixPotential::general".into(),
            ))
        }
    };
    Ok(MatrixPotential {
        entries,
        class_tag,
        symmetry,
    })
}

/// Outcome of an entrywise comparison `β¹_ij(x) ≥ β²_ij(x)` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparability {
    pub is_comparable: bool,
    pub min_margin: f64,
}

pub fn comparability(
    p1: &MatrixPotential,
    p2: &MatrixPotential,
    grid: &[Point],
) -> Result<Comparability> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let min_margin = grid
        .iter()
        .flat_map(|x| {
            let (a, b) = (p1.eval_matrix(x), p2.eval_matrix(x));
            [
                a[0][0] - b[0][0],
                a[0][1] - b[0][1],
                a[1][0] - b[1][0],
                a[1][1] - b[1][1],
            ]
        })
        .fold(f64::INFINITY, f64::min);
    Ok(Comparability {
        is_comparable: min_margin >= 0.0,
        min_margin,
    })
}
