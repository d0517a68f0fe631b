//! Command-line front end. Every command prints a human-readable summary to
//! stdout and, with `--report`, writes a JSON report embedding the full result.
//!
//! Exit codes: 0 success, 1 error, 2 a verified negative (classical input,
//! invalid certificate, failing reproduction criterion).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::ballcones::{
    certify_entangleable_semiquantum, lorentz_max_membership_centered, lorentz_min_decomposition,
    spot_check_semiquantum, verify_semiquantum, CenteredTensor, SemiquantumCertificate, DEFAULT_SPOT_CHECKS,
};
use crate::cones::json::{cone_from_path, cone_to_value};
use crate::cones::{Classicality, Cone, Radius};
use crate::dim3lab::entangle_3d;
use crate::error::{Error, Result};
use crate::exactnum::mat::{FMat, QMat};
use crate::exactnum::rational::{format_rational, QVec, Rational};
use crate::exactnum::spectral::DEFAULT_TOL;
use crate::gptnorms::{
    entanglement_robustness, injective_norm, omega_state, projective_norm, robustness_lower_bound, NormValue,
    NormedSpace, SymmetricGpt,
};
use crate::repro::{run_repro, ReproConfig};
use crate::retractlab::certify_entangleable_polyhedral;
use crate::tensorcone::{max_membership, min_membership, verify_certificate, MinMembership, SeparationCertificate};

#[derive(Debug, Parser)]
#[command(name = "conetensor", version, about = "Entangleability of convex cones and GPT tensor norms")]
pub struct Cli {
    /// Write a JSON report of the run to this path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Min,
    Max,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extreme rays, facets and classicality of a cone.
    ConeInfo { path: PathBuf },
    /// The dual cone, printed in the cone file format.
    Dual { path: PathBuf },
    /// Membership of a tensor in the minimal and/or maximal tensor product.
    TensorAnalyze {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Build and verify an entanglement certificate for a pair of cones.
    Certify {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the sampled checks of PSD-side certificates.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay a certificate against its cones.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Entanglement robustness of a state between two polyhedral cones.
    Robustness {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Injective and projective norms of a tensor of two normed spaces.
    Norms {
        #[arg(long)]
        space_x: PathBuf,
        #[arg(long)]
        space_y: PathBuf,
        #[arg(long)]
        tensor: PathBuf,
    },
    /// Run the reproduction suite.
    Repro {
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = ReproConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Test hook: corrupt the built-in constant of one criterion.
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ConeInfo { .. } => "cone-info",
            Command::Dual { .. } => "dual",
            Command::TensorAnalyze { .. } => "tensor-analyze",
            Command::Certify { .. } => "certify",
            Command::Verify { .. } => "verify",
            Command::Robustness { .. } => "robustness",
            Command::Norms { .. } => "norms",
            Command::Repro { .. } => "repro",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Certify { seed, .. } | Command::Verify { seed, .. } | Command::Repro { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

/// Outcome of one command: the summary text, the JSON result and the exit code.
pub struct Output {
    pub text: String,
    pub result: Value,
    pub exit_code: i32,
}

impl Output {
    fn ok(text: String, result: Value) -> Self {
        Output { text, result, exit_code: 0 }
    }
}

/// Parses arguments, runs the command, writes the report and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let start = Instant::now();
    let output = match run(&cli.command) {
        Ok(out) => out,
        Err(e) => failure(e),
    };
    if output.exit_code == 1 {
        eprintln!("{}", output.text);
    } else {
        println!("{}", output.text);
    }
    if let Some(path) = &cli.report {
        let report = json!({
            "command": cli.command.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cli.command.seed(),
            "exit_code": output.exit_code,
            "result": output.result,
            "elapsed_seconds": start.elapsed().as_secs_f64(),
        });
        if let Err(e) = write_json(path, &report) {
            eprintln!("error: {e}");
            return 1;
        }
    }
    output.exit_code
}

fn failure(e: Error) -> Output {
    match &e {
        Error::Classical { which, basis } => {
            let rays: Vec<Vec<String>> = basis.iter().map(|r| r.iter().map(format_rational).collect()).collect();
            Output {
                text: format!("{which} cone is classical; basis of extreme rays: {rays:?}"),
                result: json!({ "verdict": "classical", "reason": e.to_string(), "basis": rays }),
                exit_code: 2,
            }
        }
        _ => Output { text: format!("error: {e}"), result: json!({ "error": e.to_string() }), exit_code: e.exit_code() },
    }
}

pub fn run(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::ConeInfo { path } => cone_info(&cone_from_path(path)?),
        Command::Dual { path } => {
            let dual = cone_to_value(&cone_from_path(path)?.dual_cone()?);
            Ok(Output::ok(serde_json::to_string_pretty(&dual)?, dual))
        }
        Command::TensorAnalyze { a, b, tensor, mode, tol } => {
            tensor_analyze(&cone_from_path(a)?, &cone_from_path(b)?, &read_matrix(tensor)?, *mode, *tol)
        }
        Command::Certify { a, b, out, seed } => certify(&cone_from_path(a)?, &cone_from_path(b)?, out.as_deref(), *seed),
        Command::Verify { cert, a, b, seed } => {
            verify(&read_json(cert)?, &cone_from_path(a)?, &cone_from_path(b)?, *seed)
        }
        Command::Robustness { a, b, state } => robustness(&cone_from_path(a)?, &cone_from_path(b)?, &read_matrix(state)?),
        Command::Norms { space_x, space_y, tensor } => {
            let x = NormedSpace::from_json(&fs::read_to_string(space_x)?)?;
            let y = NormedSpace::from_json(&fs::read_to_string(space_y)?)?;
            norms(&x, &y, &read_matrix(tensor)?)
        }
        Command::Repro { only, seed, tol, corrupt } => {
            let config = ReproConfig { seed: *seed, tol: *tol, corrupt: corrupt.clone() };
            let reports = run_repro(&config, only.as_deref())?;
            let passed = reports.iter().all(|r| r.passed);
            let text = reports.iter().map(|r| r.line()).collect::<Vec<_>>().join("\n");
            Ok(Output { text, result: json!({ "criteria": reports, "all_passed": passed }), exit_code: if passed { 0 } else { 2 } })
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<QMat> {
    serde_json::from_value(read_json(path)?).map_err(|e| Error::Parse(format!("{}: matrix: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

fn rays_json(rays: &[QVec]) -> Value {
    json!(rays.iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn cone_info(c: &Cone) -> Result<Output> {
    let mut result = json!({ "kind": c.kind(), "ambient_dim": c.ambient_dim() });
    let mut text = format!("{} cone in dimension {}", c.kind(), c.ambient_dim());
    if c.is_polyhedral() {
        let p = c.to_polyhedral()?;
        let rays = p.extreme_rays()?;
        let facets = p.dual_rays()?;
        text += &format!("\n{} extreme rays, {} facets", rays.len(), facets.len());
        result["extreme_rays"] = rays_json(rays);
        result["facets"] = rays_json(&facets);
    }
    match c.classicality()? {
        Classicality::Classical(basis) => {
            text += "\nclassical";
            result["classical"] = json!(true);
            result["basis"] = rays_json(&basis);
        }
        Classicality::NonClassical(reason) => {
            text += &format!("\nnot classical: {reason}");
            result["classical"] = json!(false);
            result["reason"] = json!(reason);
        }
    }
    Ok(Output::ok(text, result))
}

fn lorentz_radius(c: &Cone) -> Option<(usize, f64)> {
    match c {
        Cone::Lorentz { n, r } => Some((*n, match r {
            Radius::Exact(r) => crate::exactnum::rational::to_f64(r),
            Radius::Float(r) => *r,
        })),
        _ => None,
    }
}

/// Rescales a tensor of `Lₙ(r₁)`, `Lₙ(r₂)` to the unit-radius pair and reads
/// off its centered form.
fn centered_for_unit_lorentz(z: &QMat, r1: f64, r2: f64) -> Result<CenteredTensor> {
    let f = z.to_f64();
    let n = f.rows() - 1;
    for k in 0..n {
        if f[(k, n)] != 0.0 || f[(n, k)] != 0.0 {
            return Err(Error::Unsupported("Lorentz analysis needs a centered tensor (zero mixed row and column)".into()));
        }
    }
    let mut block = FMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            block[(i, j)] = f[(i, j)] / (r1 * r2);
        }
    }
    CenteredTensor::new(block, f[(n, n)])
}

fn tensor_analyze(a: &Cone, b: &Cone, z: &QMat, mode: Mode, tol: f64) -> Result<Output> {
    if (z.rows(), z.cols()) != (a.ambient_dim(), b.ambient_dim()) {
        return Err(Error::Dimension(format!(
            "tensor is {}x{} but the cones have dimensions {} and {}",
            z.rows(),
            z.cols(),
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    let want_min = mode != Mode::Max;
    let want_max = mode != Mode::Min;
    let mut result = json!({});
    let mut lines = Vec::new();
    if a.is_polyhedral() && b.is_polyhedral() {
        let (p1, p2) = (a.to_polyhedral()?, b.to_polyhedral()?);
        if want_max {
            let m = max_membership(&p1, &p2, z)?;
            lines.push(format!("max product: {}", if m.member { "member" } else { "not a member" }));
            result["max"] = json!({ "member": m.member, "evidence": m.evidence });
        }
        if want_min {
            match min_membership(&p1, &p2, z)? {
                MinMembership::Inside(coeffs) => {
                    lines.push("min product: member".into());
                    result["min"] = json!({ "member": true, "coefficients": coeffs.iter().map(format_rational).collect::<Vec<_>>() });
                }
                MinMembership::Outside(f) => {
                    let value = f.pairing(z)?;
                    lines.push(format!("min product: not a member, separated at {}", format_rational(&value)));
                    result["min"] = json!({ "member": false, "separator": f, "separation_value": format_rational(&value) });
                }
            }
        }
    } else if let (Some((n1, r1)), Some((n2, r2))) = (lorentz_radius(a), lorentz_radius(b)) {
        if n1 != n2 {
            return Err(Error::Unsupported("Lorentz analysis needs cones of equal dimension".into()));
        }
        let centered = centered_for_unit_lorentz(z, r1, r2)?;
        if want_max {
            let member = lorentz_max_membership_centered(&centered, tol)?;
            lines.push(format!("max product: {}", if member { "member" } else { "not a member" }));
            result["max"] = json!({ "member": member });
        }
        if want_min {
            match lorentz_min_decomposition(&centered, 1.0, tol)? {
                Some(terms) => {
                    lines.push(format!("min product: member ({} product terms)", terms.len()));
                    result["min"] = json!({ "member": true, "terms": terms });
                }
                None => {
                    lines.push("min product: not a member".into());
                    result["min"] = json!({ "member": false });
                }
            }
        }
        result["tolerance"] = json!(tol);
    } else {
        return Err(Error::Unsupported(format!("tensor analysis of {} and {} cones", a.kind(), b.kind())));
    }
    Ok(Output::ok(lines.join("\n"), result))
}

fn relabel(e: Error, which: &str) -> Error {
    match e {
        Error::Classical { basis, .. } => Error::Classical { which: which.into(), basis },
        other => other,
    }
}

fn check_not_classical(c: &Cone, which: &str) -> Result<()> {
    match c.classicality()? {
        Classicality::Classical(basis) => Err(Error::Classical { which: which.into(), basis }),
        Classicality::NonClassical(_) => Ok(()),
    }
}

/// A certificate of either family, as produced by [`certify_pair`].
#[derive(Clone, Debug, PartialEq)]
pub enum AnyCertificate {
    Polyhedral(SeparationCertificate),
    Semiquantum(SemiquantumCertificate),
}

impl AnyCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyCertificate::Polyhedral(_) => "polyhedral",
            AnyCertificate::Semiquantum(_) => "semiquantum",
        }
    }

    pub fn separation_value(&self) -> &Rational {
        match self {
            AnyCertificate::Polyhedral(c) => &c.separation_value,
            AnyCertificate::Semiquantum(c) => &c.separation_value,
        }
    }

    pub fn to_value(&self) -> Result<Value> {
        Ok(match self {
            AnyCertificate::Polyhedral(c) => serde_json::to_value(c)?,
            AnyCertificate::Semiquantum(c) => serde_json::to_value(c)?,
        })
    }

    /// Semiquantum certificates carry the PSD size `n`; polyhedral ones do not.
    pub fn from_value(v: &Value) -> Result<Self> {
        if v.get("n").is_some() {
            Ok(AnyCertificate::Semiquantum(serde_json::from_value(v.clone())?))
        } else {
            Ok(AnyCertificate::Polyhedral(serde_json::from_value(v.clone())?))
        }
    }
}

/// Picks the construction for the pair: the planar pipeline for two cones
/// over polygons, the semiquantum pipeline against a PSD cone, and descent
/// for other polyhedral pairs. Classical inputs fail with [`Error::Classical`].
pub fn certify_pair(a: &Cone, b: &Cone, seed: u64) -> Result<AnyCertificate> {
    check_not_classical(a, "first")?;
    check_not_classical(b, "second")?;
    match (a, b) {
        (Cone::ConeOverPolygon(p1), Cone::ConeOverPolygon(p2)) => Ok(AnyCertificate::Polyhedral(entangle_3d(p1, p2)?)),
        (_, Cone::Psd { n }) if a.is_polyhedral() => Ok(AnyCertificate::Semiquantum(
            certify_entangleable_semiquantum(&a.to_polyhedral()?, *n, seed).map_err(|e| relabel(e, "first"))?,
        )),
        _ if a.is_polyhedral() && b.is_polyhedral() => Ok(AnyCertificate::Polyhedral(certify_entangleable_polyhedral(
            &a.to_polyhedral()?,
            &b.to_polyhedral()?,
        )?)),
        _ => Err(Error::Unsupported(format!("certificates for {} and {} cones", a.kind(), b.kind()))),
    }
}

/// Replays a certificate against its cones. Returns the verdict and the
/// per-check detail.
pub fn verify_any(cert: &AnyCertificate, a: &Cone, b: &Cone, seed: u64) -> Result<(bool, Value)> {
    match cert {
        AnyCertificate::Semiquantum(c) => {
            let Cone::Psd { n } = b else {
                return Err(Error::InvalidInput("a semiquantum certificate needs a PSD second cone".into()));
            };
            let p = a.to_polyhedral()?;
            let exact = verify_semiquantum(c, &p, *n)?;
            let spot = spot_check_semiquantum(c, &p, DEFAULT_SPOT_CHECKS, seed, DEFAULT_TOL)?;
            Ok((exact && spot.passed(), json!({ "exact_replay": exact, "spot_check": spot })))
        }
        AnyCertificate::Polyhedral(c) => {
            let ok = verify_certificate(c, &a.to_polyhedral()?, &b.to_polyhedral()?)?;
            Ok((ok, json!({ "exact_replay": ok })))
        }
    }
}

fn certify(a: &Cone, b: &Cone, out: Option<&Path>, seed: u64) -> Result<Output> {
    let any = certify_pair(a, b, seed)?;
    let (cert, kind) = (any.to_value()?, any.kind());
    let value = format_rational(any.separation_value());
    let mut text = format!("entangleable: {kind} certificate with separation value {value}");
    match out {
        Some(path) => {
            write_json(path, &cert)?;
            text += &format!("\ncertificate written to {}", path.display());
        }
        None => text += &format!("\n{}", serde_json::to_string_pretty(&cert)?),
    }
    Ok(Output::ok(text, json!({ "verdict": "entangleable", "kind": kind, "separation_value": value, "certificate": cert })))
}

fn verify(cert: &Value, a: &Cone, b: &Cone, seed: u64) -> Result<Output> {
    let (valid, detail) = verify_any(&AnyCertificate::from_value(cert)?, a, b, seed)?;
    let text = if valid { "certificate valid" } else { "certificate invalid" };
    Ok(Output { text: text.into(), result: json!({ "valid": valid, "detail": detail }), exit_code: if valid { 0 } else { 2 } })
}

/// The order unit used when none is given: the last coordinate for cones
/// over polygons, otherwise the sum of the dual extreme rays.
pub fn default_unit(c: &Cone) -> Result<QVec> {
    if let Cone::ConeOverPolygon(_) = c {
        return Ok(crate::cones::polyhedral::unit(3, 2));
    }
    let rays = c.to_polyhedral()?.dual_rays()?;
    let mut u = vec![Rational::from_integer(0.into()); c.ambient_dim()];
    for r in &rays {
        for (x, y) in u.iter_mut().zip(r) {
            *x += y;
        }
    }
    Ok(u)
}

fn robustness(a: &Cone, b: &Cone, state: &QMat) -> Result<Output> {
    let (p1, p2) = (a.to_polyhedral()?, b.to_polyhedral()?);
    let (u1, u2) = (default_unit(a)?, default_unit(b)?);
    let r = entanglement_robustness(&p1, &u1, &p2, &u2, state)?;
    let value = format_rational(&r.value);
    Ok(Output::ok(format!("entanglement robustness {value}"), json!({ "robustness": r, "units": [rays_json(&[u1]), rays_json(&[u2])] })))
}

fn norm_json(v: &NormValue) -> Value {
    serde_json::to_value(v).expect("norm value serializes")
}

fn norms(x: &NormedSpace, y: &NormedSpace, z: &QMat) -> Result<Output> {
    let eps = injective_norm(x, y, z)?;
    let pi = projective_norm(x, y, z)?;
    let mut text = format!("injective norm {}\nprojective norm {}", show(&eps), show(&pi.value));
    let mut result = json!({ "epsilon": norm_json(&eps), "pi": norm_json(&pi.value), "robustness": null, "lower_bound": null, "state": null });
    if let Some(d) = &pi.dual {
        result["pi_dual"] = serde_json::to_value(d)?;
    }
    // The state γ⊗γ + z needs ε(z) ≤ 1, so larger tensors are rescaled.
    let scaled = match &eps {
        NormValue::Exact(e) if *e > Rational::from_integer(1.into()) => z.scale(&(Rational::from_integer(1.into()) / e)),
        NormValue::Float(e) if *e > 1.0 => {
            return Ok(Output::ok(text + "\nrobustness needs injective norm at most 1", result));
        }
        _ => z.clone(),
    };
    let (s1, s2) = (SymmetricGpt::from_space(x.clone())?, SymmetricGpt::from_space(y.clone())?);
    let bound = robustness_lower_bound(&s1, &s2, &scaled)?;
    text += &format!("\nrobustness lower bound {}", show(&bound));
    result["lower_bound"] = norm_json(&bound);
    if let (Cone::Polyhedral(_) | Cone::ConeOverPolygon(_) | Cone::Classical { .. }, true) =
        (&s1.gpt.cone, s2.gpt.cone.is_polyhedral())
    {
        let state = omega_state(&s1, &s2, &scaled)?;
        let (c1, c2) = (s1.gpt.cone.to_polyhedral()?, s2.gpt.cone.to_polyhedral()?);
        let r = entanglement_robustness(&c1, &s1.gpt.unit, &c2, &s2.gpt.unit, &state)?;
        text += &format!("\nentanglement robustness {}", format_rational(&r.value));
        result["robustness"] = json!(format_rational(&r.value));
        result["state"] = serde_json::to_value(&state)?;
    }
    Ok(Output::ok(text, result))
}

fn show(v: &NormValue) -> String {
    match v {
        NormValue::Exact(r) => format_rational(r),
        NormValue::Float(f) => format!("{f:.12}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Polygon;

    #[test]
    fn default_units_are_interior() {
        let square = Cone::ConeOverPolygon(Polygon::square());
        assert_eq!(default_unit(&square).unwrap(), crate::cones::polyhedral::unit(3, 2));
        let orthant = Cone::Classical { n: 3 };
        let u = default_unit(&orthant).unwrap();
        assert!(u.iter().all(|x| *x > Rational::from_integer(0.into())));
    }

    #[test]
    fn classical_input_exits_with_two() {
        let out = match certify(&Cone::Classical { n: 3 }, &Cone::ConeOverPolygon(Polygon::square()), None, 0) {
            Err(e) => failure(e),
            Ok(_) => panic!("classical input certified"),
        };
        assert_eq!(out.exit_code, 2);
        assert!(out.text.contains("first cone is classical"));
    }

    #[test]
    fn lorentz_tensor_must_be_centered() {
        let mut z = QMat::identity(3);
        z[(0, 2)] = Rational::from_integer(1.into());
        assert!(centered_for_unit_lorentz(&z, 1.0, 1.0).is_err());
    }
}
