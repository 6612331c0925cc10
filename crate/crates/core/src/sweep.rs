//! Grid sweeps, threshold bisection, and boundary curves over the state
//! families. Every margin comes from the full state → tensor → criterion
//! pipeline.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{evaluate, Criterion, CriterionReport};
use crate::error::{Error, Result};
use crate::families::{Family, Params};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_STEPS: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, steps: usize) -> Self {
        Self {
            name: name.into(),
            lo,
            hi,
            steps,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Family,
    /// Fixed parameters; swept axes override them.
    #[serde(default)]
    pub params: Params,
    pub axes: Vec<Axis>,
    pub criteria: Vec<Criterion>,
    #[serde(default)]
    pub k_values: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.family.is_tripartite() {
            return Err(Error::NotTripartite(self.family.tag().into()));
        }
        if self.axes.is_empty() {
            return Err(Error::InvalidConfig("at least one axis is required".into()));
        }
        if self.criteria.is_empty() {
            return Err(Error::InvalidConfig("no criteria requested".into()));
        }
        if self.criteria.contains(&Criterion::KyFan) && self.k_values.is_empty() {
            return Err(Error::InvalidConfig("T2 requires k_values".into()));
        }
        self.family.resolve(&self.params)?;
        for (i, axis) in self.axes.iter().enumerate() {
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return Err(Error::InvalidConfig(format!(
                    "axis `{}` repeated",
                    axis.name
                )));
            }
            if !(axis.lo < axis.hi) {
                return Err(Error::InvalidConfig(format!(
                    "axis `{}` needs lo < hi, got [{}, {}]",
                    axis.name, axis.lo, axis.hi
                )));
            }
            if axis.steps < 2 {
                return Err(Error::InvalidConfig(format!(
                    "axis `{}` needs at least 2 steps",
                    axis.name
                )));
            }
            let probe = Params::from([(axis.name.clone(), axis.lo)]);
            self.family.resolve(&probe)?;
            let range = match axis.name.as_str() {
                "x" | "y" => Some((0.0, 1.0)),
                "p" | "p1" | "p2" => Some((-1.0, 1.0)),
                _ => None,
            };
            if let Some((min, max)) = range {
                if axis.lo < min || axis.hi > max {
                    return Err(Error::InvalidParameter {
                        name: axis.name.clone(),
                        value: if axis.lo < min { axis.lo } else { axis.hi },
                        reason: format!("must lie in [{min}, {max}]"),
                    });
                }
            }
        }
        let d = self.family.tensor(&self.params)?.d();
        if let Some(&k) = self.k_values.iter().find(|&&k| k == 0 || k > d * d - 1) {
            return Err(Error::KyFanOrder { k, max: d * d - 1 });
        }
        Ok(())
    }
}

/// Evaluates `criteria` on one family member.
pub fn evaluate_point(
    family: Family,
    params: &Params,
    criteria: &[Criterion],
    k_values: &[usize],
) -> Result<Vec<CriterionReport>> {
    let t = family.tensor(params)?;
    evaluate(&t, criteria, k_values)
}

/// Margin of a single criterion column.
pub fn margin(
    family: Family,
    params: &Params,
    criterion: Criterion,
    k: Option<usize>,
) -> Result<f64> {
    let ks: Vec<usize> = k.into_iter().collect();
    if criterion == Criterion::KyFan && ks.is_empty() {
        return Err(Error::InvalidConfig("T2 requires a Ky Fan order".into()));
    }
    let reports = evaluate_point(family, params, &[criterion], &ks)?;
    Ok(reports[0].margin)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: Vec<f64>,
    pub margins: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub label: String,
    pub criterion: Criterion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub family: Family,
    pub axes: Vec<String>,
    pub columns: Vec<Column>,
    pub rows: Vec<SweepRow>,
    /// Located sign changes; only filled for one-axis sweeps.
    pub thresholds: Vec<ThresholdResult>,
}

impl SweepResult {
    pub fn column_index(&self, label: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.label == label)
    }

    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let i = self.column_index(label)?;
        Some(self.rows.iter().map(|r| r.margins[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let header: Vec<&str> = self
            .axes
            .iter()
            .map(String::as_str)
            .chain(self.columns.iter().map(|c| c.label.as_str()))
            .collect();
        out.write_record(&header)?;
        for row in &self.rows {
            out.write_record(row.point.iter().chain(&row.margins).map(|&v| sig9(v)))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn write(&self, spec: &OutputSpec) -> Result<()> {
        if let Some(dir) = spec.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = std::io::BufWriter::new(std::fs::File::create(&spec.path)?);
        match spec.format {
            OutputFormat::Csv => self.write_csv(file),
            OutputFormat::Json => self.write_json(file),
        }
    }
}

/// Formats with 9 significant digits, dropping trailing zeros.
pub fn sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{v:.8e}")
    }
}

/// One column per criterion, expanded over `k_values` for `T2`.
pub fn columns_for(criteria: &[Criterion], k_values: &[usize]) -> Vec<Column> {
    let mut columns = Vec::new();
    for &c in criteria {
        if c == Criterion::KyFan {
            for &k in k_values {
                columns.push(Column {
                    label: format!("{c}_k{k}"),
                    criterion: c,
                    k: Some(k),
                });
            }
        } else {
            columns.push(Column {
                label: c.to_string(),
                criterion: c,
                k: None,
            });
        }
    }
    columns
}

/// Evaluates an explicit list of points, in parallel, keeping input order.
pub fn evaluate_rows(
    family: Family,
    fixed: &Params,
    axis_names: &[String],
    points: Vec<Vec<f64>>,
    criteria: &[Criterion],
    k_values: &[usize],
) -> Result<Vec<SweepRow>> {
    points
        .into_par_iter()
        .map(|point| {
            let mut params = fixed.clone();
            for (name, &v) in axis_names.iter().zip(&point) {
                params.insert(name.clone(), v);
            }
            let reports = evaluate_point(family, &params, criteria, k_values)?;
            Ok(SweepRow {
                point,
                margins: reports.iter().map(|r| r.margin).collect(),
            })
        })
        .collect()
}

pub fn sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let columns = columns_for(&config.criteria, &config.k_values);
    let grids: Vec<Vec<f64>> = config.axes.iter().map(Axis::values).collect();
    let total: usize = grids.iter().map(Vec::len).product();
    let points: Vec<Vec<f64>> = (0..total)
        .map(|flat| {
            // row-major: the last axis varies fastest
            let mut rem = flat;
            let mut point = vec![0.0; grids.len()];
            for (slot, grid) in point.iter_mut().zip(&grids).rev() {
                *slot = grid[rem % grid.len()];
                rem /= grid.len();
            }
            point
        })
        .collect();
    let axis_names: Vec<String> = config.axes.iter().map(|a| a.name.clone()).collect();
    let rows = evaluate_rows(
        config.family,
        &config.params,
        &axis_names,
        points,
        &config.criteria,
        &config.k_values,
    )?;

    let mut thresholds = Vec::new();
    if let [axis] = config.axes.as_slice() {
        for (ci, col) in columns.iter().enumerate() {
            for pair in rows.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                if (a.margins[ci] > 0.0) != (b.margins[ci] > 0.0) {
                    thresholds.push(find_threshold(&ThresholdSpec {
                        family: config.family,
                        params: config.params.clone(),
                        criterion: col.criterion,
                        k: col.k,
                        parameter: axis.name.clone(),
                        lo: a.point[0],
                        hi: b.point[0],
                        tol: DEFAULT_TOL,
                    })?);
                }
            }
        }
    }

    let result = SweepResult {
        family: config.family,
        axes: axis_names,
        columns,
        rows,
        thresholds,
    };
    if let Some(spec) = &config.output {
        result.write(spec)?;
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub family: Family,
    #[serde(default)]
    pub params: Params,
    pub criterion: Criterion,
    pub k: Option<usize>,
    pub parameter: String,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bisection {
    pub root: f64,
    pub bracket_width: f64,
    pub residual: f64,
}

/// Bisects on the detection sign (`f > 0`) of `f` over `[lo, hi]`.
pub fn bisect(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Bisection> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol".into(),
            value: tol,
            reason: "must be positive".into(),
        });
    }
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if (fa > 0.0) == (fb > 0.0) {
        return Err(Error::NoSignChange {
            lo,
            hi,
            margin_lo: fa,
            margin_hi: fb,
        });
    }
    let side_a = fa > 0.0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (f(mid)? > 0.0) == side_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    let root = 0.5 * (a + b);
    Ok(Bisection {
        root,
        bracket_width: b - a,
        residual: f(root)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub parameter: String,
    pub threshold: f64,
    pub criterion: Criterion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub bracket_width: f64,
    pub residual_margin: f64,
}

pub fn find_threshold(spec: &ThresholdSpec) -> Result<ThresholdResult> {
    spec.family
        .resolve(&Params::from([(spec.parameter.clone(), spec.lo)]))?;
    let b = bisect(
        |v| {
            let mut p = spec.params.clone();
            p.insert(spec.parameter.clone(), v);
            margin(spec.family, &p, spec.criterion, spec.k)
        },
        spec.lo,
        spec.hi,
        spec.tol,
    )?;
    Ok(ThresholdResult {
        parameter: spec.parameter.clone(),
        threshold: b.root,
        criterion: spec.criterion,
        k: spec.k,
        bracket_width: b.bracket_width,
        residual_margin: b.residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub criterion: Criterion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub x: f64,
    /// `(p1, p2)` pairs where the margin crosses zero.
    pub points: Vec<(f64, f64)>,
    /// Largest detectable `p1` (taken along `p2 = -1`).
    pub extreme_p1: f64,
    /// Largest detectable `p2` (taken along `p1 = -1`).
    pub extreme_p2: f64,
}

/// Zero set of a criterion margin in the `(p1, p2)` plane of the `thm5`
/// family at fixed `x`. The detection region is assumed to contain the
/// corner `p1 = p2 = -1`.
pub fn boundary_curve(
    criterion: Criterion,
    k: Option<usize>,
    x: f64,
    steps: usize,
    tol: f64,
) -> Result<BoundaryCurve> {
    let m = |p1: f64, p2: f64| {
        let params = Params::from([
            ("p1".to_string(), p1),
            ("p2".to_string(), p2),
            ("x".to_string(), x),
        ]);
        margin(Family::Thm5, &params, criterion, k)
    };
    let extreme_p1 = bisect(|p1| m(p1, -1.0), -1.0, 1.0, tol)?.root;
    let extreme_p2 = bisect(|p2| m(-1.0, p2), -1.0, 1.0, tol)?.root;
    let steps = steps.max(2);
    let grid = Axis::new("p1", -1.0, extreme_p1, steps).values();
    let mut points = grid[..steps - 1]
        .par_iter()
        .map(|&p1| Ok((p1, bisect(|p2| m(p1, p2), -1.0, 1.0, tol)?.root)))
        .collect::<Result<Vec<_>>>()?;
    points.push((extreme_p1, -1.0));
    Ok(BoundaryCurve {
        criterion,
        k,
        x,
        points,
        extreme_p1,
        extreme_p2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{concurrence_offset, frobenius_bound};

    fn ex3_config(steps: usize) -> SweepConfig {
        SweepConfig {
            family: Family::Ex3,
            params: Params::new(),
            axes: vec![Axis::new("x", 0.0, 1.0, steps)],
            criteria: vec![Criterion::Frobenius, Criterion::Concurrence],
            k_values: vec![],
            output: None,
        }
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(-0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(0.1), "0.1");
        assert_eq!(sig9(3.952847075210474), "3.95284708");
        assert_eq!(sig9(-0.968245837), "-0.968245837");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1.5e-9), "1.50000000e-9");
    }

    #[test]
    fn axis_endpoints_are_exact() {
        let a = Axis::new("x", 0.0, 1.0, 11);
        let v = a.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[10], 1.0);
        assert!((v[3] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut c = ex3_config(11);
        assert!(c.validate().is_ok());
        c.axes[0].steps = 1;
        assert!(c.validate().is_err());
        let mut c = ex3_config(11);
        c.axes[0].hi = 1.5;
        assert!(c.validate().is_err());
        let mut c = ex3_config(11);
        c.axes[0].name = "q".into();
        assert!(c.validate().is_err());
        let mut c = ex3_config(11);
        c.criteria.push(Criterion::KyFan);
        assert!(c.validate().is_err());
        c.k_values = vec![9];
        assert!(matches!(
            c.validate(),
            Err(Error::KyFanOrder { k: 9, max: 8 })
        ));
        let mut c = ex3_config(11);
        c.family = Family::Werner;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_signal_gives_noise_floor() {
        let r = sweep(&ex3_config(3)).unwrap();
        assert_eq!(r.rows[0].point, vec![0.0]);
        assert!((r.rows[0].margins[0] + frobenius_bound(3)).abs() < 1e-12);
        assert!((r.rows[0].margins[1] + concurrence_offset(3)).abs() < 1e-12);
    }

    #[test]
    fn row_major_order_and_csv_header() {
        let c = SweepConfig {
            family: Family::Ex2,
            params: Params::new(),
            axes: vec![Axis::new("x", 0.0, 0.5, 2), Axis::new("y", 0.0, 0.5, 3)],
            criteria: vec![Criterion::Concurrence],
            k_values: vec![],
            output: None,
        };
        let r = sweep(&c).unwrap();
        let pts: Vec<_> = r.rows.iter().map(|r| r.point.clone()).collect();
        assert_eq!(
            pts,
            vec![
                vec![0.0, 0.0],
                vec![0.0, 0.25],
                vec![0.0, 0.5],
                vec![0.5, 0.0],
                vec![0.5, 0.25],
                vec![0.5, 0.5]
            ]
        );
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("x,y,T3"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn bisect_finds_linear_root() {
        let b = bisect(|v| Ok(v - 0.3), 0.0, 1.0, 1e-9).unwrap();
        assert!((b.root - 0.3).abs() < 1e-9);
        assert!(b.bracket_width <= 1e-9);
        assert!(matches!(
            bisect(|v| Ok(v + 1.0), 0.0, 1.0, 1e-9),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn ghz_threshold_matches_closed_form() {
        // T1 on GHZ/W mixtures at y = 0 crosses where 2x = sqrt(3)
        let spec = ThresholdSpec {
            family: Family::Ex2,
            params: Params::from([("y".to_string(), 0.0)]),
            criterion: Criterion::Frobenius,
            k: None,
            parameter: "x".into(),
            lo: 0.5,
            hi: 1.0,
            tol: 1e-9,
        };
        let t = find_threshold(&spec).unwrap();
        assert!((t.threshold - 3f64.sqrt() / 2.0).abs() < 1e-8);
        assert!(t.bracket_width <= 1e-9);
    }
}
