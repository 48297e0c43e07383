use std::fs;
use std::path::Path;

use discop::num_complex::Complex;
use discop::{
    build_characteristic_polynomial, construct, run_verification, spectrum, DiscreteOperator, Dd, Error, Guard,
    OperatorSpec, Real, VerificationReport,
};
use serde::Serialize;

use crate::args::{EulerArgs, Format, OperatorArgs, OutputArgs, Precision, TableArgs, VerifyArgs};
use crate::render::{csv, float, json};

/// Why a command did not succeed, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// The identities were checked and at least one residual missed (1).
    Verification,
    /// Bad arguments or a guard violation (2).
    Usage(String),
    /// Numerical breakdown; the JSON body has already been written (3).
    Numerical(Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

fn classify(e: Error) -> Failure {
    match e {
        Error::OrderOutOfRange { .. }
        | Error::StepOutOfRange { .. }
        | Error::NoRoots
        | Error::Capacity { .. }
        | Error::Domain { .. }
        | Error::Malformed(_) => Failure::Usage(e.to_string()),
        other => Failure::Numerical(other),
    }
}

#[derive(Serialize)]
struct ErrorDoc {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Divergent { .. } => "divergent",
        Error::Pole => "pole",
        Error::NumericalFailure { .. } => "numerical_failure",
        Error::NearUnitCircle { .. } => "near_unit_circle",
        Error::UnbalancedSpectrum { .. } => "unbalanced_spectrum",
        Error::NearMultipleRoot { .. } => "near_multiple_root",
        Error::NotReal { .. } => "not_real",
        Error::RouteMismatch { .. } => "route_mismatch",
        Error::TruncationLimit { .. } => "truncation_limit",
        _ => "invalid_argument",
    }
}

/// The structured body printed for exit code 3.
pub fn error_json(e: &Error) -> String {
    json(&ErrorDoc {
        error: error_kind(e),
        message: e.to_string(),
        ratio: match e {
            Error::Divergent { ratio } => Some(*ratio),
            _ => None,
        },
    })
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Emits the error body for numerical failures, then passes the failure on.
fn report_numerical(out: &OutputArgs, f: Failure) -> Failure {
    if let Failure::Numerical(e) = &f {
        if let Err(io) = emit(out, &error_json(e)) {
            return io;
        }
    }
    f
}

fn operator_spec(a: &OperatorArgs) -> Result<OperatorSpec, Failure> {
    let guard = if a.unsafe_range { Guard::Unsafe } else { Guard::Standard };
    OperatorSpec::with_guard(a.m, a.h, guard).map_err(classify)
}

#[derive(Serialize)]
struct ComplexDoc {
    re: f64,
    im: f64,
}

impl ComplexDoc {
    fn new<R: Real>(z: Complex<R>) -> Self {
        ComplexDoc {
            re: z.re.to_f64(),
            im: z.im.to_f64(),
        }
    }
}

#[derive(Serialize)]
struct OperatorDoc {
    m: usize,
    h: f64,
    p: f64,
    #[serde(rename = "C")]
    c: f64,
    roots: Vec<ComplexDoc>,
    amplitudes: Vec<ComplexDoc>,
    values: Vec<f64>,
}

/// Built in double-double, then rounded; the printed constants reproduce
/// the printed values exactly when reassembled in `f64`.
fn rounded_operator(spec: &OperatorSpec) -> Result<DiscreteOperator<f64>, Failure> {
    construct::<Dd>(spec).and_then(|op| op.to_f64()).map_err(classify)
}

fn value_rows(op: &DiscreteOperator<f64>, betas: impl Iterator<Item = i64>) -> String {
    csv(
        &["beta", "value"],
        betas.map(|b| vec![b.to_string(), float(op.evaluate(b))]),
    )
}

pub fn construct_cmd(a: &TableArgs) -> Result<(), Failure> {
    let spec = operator_spec(&a.op)?;
    let op = rounded_operator(&spec).map_err(|f| report_numerical(&a.op.out, f))?;
    let bm = a.beta_max as i64;
    let text = match a.op.out.format {
        Format::Csv => value_rows(&op, 0..=bm),
        Format::Json => json(&OperatorDoc {
            m: spec.m(),
            h: spec.h(),
            p: op.p(),
            c: op.c(),
            roots: op.roots().into_iter().map(ComplexDoc::new).collect(),
            amplitudes: op.amplitudes().into_iter().map(ComplexDoc::new).collect(),
            values: (0..=bm).map(|b| op.evaluate(b)).collect(),
        }),
    };
    emit(&a.op.out, &text)
}

#[derive(Serialize)]
struct TableDoc {
    m: usize,
    h: f64,
    beta: Vec<i64>,
    values: Vec<f64>,
}

pub fn table_cmd(a: &TableArgs) -> Result<(), Failure> {
    let spec = operator_spec(&a.op)?;
    let op = rounded_operator(&spec).map_err(|f| report_numerical(&a.op.out, f))?;
    let bm = a.beta_max as i64;
    let text = match a.op.out.format {
        Format::Csv => value_rows(&op, -bm..=bm),
        Format::Json => json(&TableDoc {
            m: spec.m(),
            h: spec.h(),
            beta: (-bm..=bm).collect(),
            values: (-bm..=bm).map(|b| op.evaluate(b)).collect(),
        }),
    };
    emit(&a.op.out, &text)
}

#[derive(Serialize)]
struct ReportDoc {
    m: usize,
    h: f64,
    precision: &'static str,
    beta_max: u32,
    tolerance: f64,
    residual_exp_plus: f64,
    residual_exp_minus: f64,
    residual_monomial: Vec<f64>,
    residual_delta: f64,
    residual_root_sum: Vec<f64>,
    max_route_discrepancy: f64,
    convergence_ratio: f64,
    beyond_stated_range: bool,
    passed: bool,
}

impl ReportDoc {
    fn new(r: VerificationReport, precision: Precision) -> Self {
        ReportDoc {
            m: r.spec.m(),
            h: r.spec.h(),
            precision: match precision {
                Precision::Double => "double",
                Precision::DoubleDouble => "double-double",
            },
            beta_max: r.beta_max,
            tolerance: r.tolerance,
            residual_exp_plus: r.residual_exp_plus,
            residual_exp_minus: r.residual_exp_minus,
            residual_monomial: r.residual_monomial,
            residual_delta: r.residual_delta,
            residual_root_sum: r.residual_root_sum,
            max_route_discrepancy: r.max_route_discrepancy,
            convergence_ratio: r.convergence_ratio,
            beyond_stated_range: r.beyond_stated_range,
            passed: r.passed,
        }
    }

    fn csv(&self) -> String {
        let mut rows = vec![
            ("residual_exp_plus".to_string(), self.residual_exp_plus),
            ("residual_exp_minus".to_string(), self.residual_exp_minus),
            ("residual_delta".to_string(), self.residual_delta),
        ];
        for (n, r) in self.residual_monomial.iter().enumerate() {
            rows.push((format!("residual_monomial_{n}"), *r));
        }
        for (k, r) in self.residual_root_sum.iter().enumerate() {
            rows.push((format!("residual_root_sum_{}", k + 1), *r));
        }
        rows.push(("max_route_discrepancy".to_string(), self.max_route_discrepancy));
        rows.push(("convergence_ratio".to_string(), self.convergence_ratio));
        rows.push(("tolerance".to_string(), self.tolerance));
        csv(
            &["quantity", "value"],
            rows.into_iter()
                .map(|(k, v)| vec![k, float(v)])
                .chain([vec!["passed".to_string(), self.passed.to_string()]]),
        )
    }
}

fn verify_in<R: Real>(spec: &OperatorSpec, beta_max: u32, tol: f64) -> Result<VerificationReport, Error> {
    let op = construct::<R>(spec)?;
    run_verification(&op, beta_max, tol)
}

pub fn verify_cmd(a: &VerifyArgs) -> Result<(), Failure> {
    let spec = operator_spec(&a.op)?;
    let tol = a.tol.unwrap_or_else(|| discop::default_tolerance(spec.m()));
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::Usage(format!("tolerance must be a positive number, got {tol}")));
    }
    let report = match a.precision {
        Precision::Double => verify_in::<f64>(&spec, a.beta_max, tol),
        Precision::DoubleDouble => verify_in::<Dd>(&spec, a.beta_max, tol),
    }
    .map_err(|e| report_numerical(&a.op.out, classify(e)))?;
    let doc = ReportDoc::new(report, a.precision);
    let text = match a.op.out.format {
        Format::Json => json(&doc),
        Format::Csv => doc.csv(),
    };
    emit(&a.op.out, &text)?;
    if doc.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct RootDoc {
    re: f64,
    im: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SpectrumDoc {
    m: usize,
    h: f64,
    interior: Vec<RootDoc>,
    exterior: Vec<RootDoc>,
    reciprocal_products: Vec<ComplexDoc>,
    convergence_ratio: f64,
}

pub fn roots_cmd(a: &OperatorArgs) -> Result<(), Failure> {
    let spec = operator_spec(a)?;
    let cp = build_characteristic_polynomial::<Dd>(&spec).map_err(classify)?;
    let sp = spectrum(&cp).map_err(|e| report_numerical(&a.out, classify(e)))?;
    let doc_root = |z: &Complex<Dd>| RootDoc {
        re: z.re.to_f64(),
        im: z.im.to_f64(),
        residual: discop::spectrum::backward_error(cp.poly(), *z),
    };
    let doc = SpectrumDoc {
        m: spec.m(),
        h: spec.h(),
        interior: sp.interior().iter().map(doc_root).collect(),
        exterior: sp.exterior().iter().map(doc_root).collect(),
        reciprocal_products: sp
            .interior()
            .iter()
            .zip(sp.exterior())
            .map(|(a, b)| ComplexDoc::new(a * b))
            .collect(),
        convergence_ratio: sp.convergence_ratio(spec.h()),
    };
    let text = match a.out.format {
        Format::Json => json(&doc),
        Format::Csv => {
            let rows = doc
                .interior
                .iter()
                .map(|r| ("interior", r))
                .chain(doc.exterior.iter().map(|r| ("exterior", r)))
                .map(|(kind, r)| vec![kind.to_string(), float(r.re), float(r.im), float(r.residual)]);
            csv(&["kind", "re", "im", "residual"], rows)
        }
    };
    emit(&a.out, &text)
}

pub fn euler_cmd(a: &EulerArgs) -> Result<(), Failure> {
    let poly = discop::special::euler_polynomial(a.k).map_err(classify)?;
    let coeffs = poly.coeffs();
    let text = match a.out.format {
        Format::Json => {
            let items: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            format!("[{}]\n", items.join(", "))
        }
        Format::Csv => csv(
            &["power", "coefficient"],
            coeffs.iter().enumerate().map(|(i, c)| vec![i.to_string(), c.to_string()]),
        ),
    };
    emit(&a.out, &text)
}
