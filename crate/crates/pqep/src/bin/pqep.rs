//! Command line front end: `pqep eig|qiep|eep|verify <file> [options]`.

use clap::{Parser, Subcommand};
use pqep::eep::{embed, request_from_replacement, PhiChoice};
use pqep::error::{PqepError, Result};
use pqep::gamma::{gamma_membership, ParameterMatrix};
use pqep::io::{exit_code_for, write_matrix, ProblemFile, Report, Tolerances};
use pqep::mat::{frob, star_of, C64};
use pqep::oracle::{pair_residual, qep_eigensolve};
use pqep::poly::{residual, PalindromicPolynomial};
use pqep::qiep::{solve_qiep, QiepOptions};
use pqep::spectrum::classify_spectrum;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "pqep",
    about = "Palindromic quadratic eigenvalue problems: solve, invert, embed, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenvalues, pairing verdict and per-pair residuals of (A, Q).
    Eig(CommonArgs),
    /// Construct (A, Q) with the prescribed eigenvalues; writes A/Q/X files.
    Qiep(CommonArgs),
    /// Replace measured eigenvalues, keeping the rest; writes A_new/Q_new.
    Eep(CommonArgs),
    /// Verify a claimed decomposition (A, Q, X, J and optionally Gamma).
    Verify(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Problem file (JSON)
    file: PathBuf,
    /// Random seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for generated matrices
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Emit the report as JSON instead of key=value lines
    #[arg(long)]
    json: bool,
    /// Tolerance override KEY=VAL (tol_pair, tol_struct, residual_gate)
    #[arg(long = "tol", value_name = "KEY=VAL")]
    tol: Vec<String>,
}

fn main() {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&CommonArgs) -> Result<Report>) = match &cli.command {
        Cmd::Eig(a) => (a, cmd_eig),
        Cmd::Qiep(a) => (a, cmd_qiep),
        Cmd::Eep(a) => (a, cmd_eep),
        Cmd::Verify(a) => (a, cmd_verify),
    };
    match run(args) {
        Ok(report) => {
            print!("{}", report.render(args.json));
            let failed = report.lines().contains("verdict=fail");
            std::process::exit(if failed { 1 } else { 0 });
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}

fn tolerances(args: &CommonArgs, file: &ProblemFile) -> Result<Tolerances> {
    let mut tol = file.tolerances.clone().unwrap_or_default();
    for kv in &args.tol {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| PqepError::DimensionMismatch(format!("bad --tol {kv:?}")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| PqepError::DimensionMismatch(format!("bad --tol value {v:?}")))?;
        tol.set(k, v)?;
    }
    Ok(tol)
}

fn load_poly(file: &ProblemFile) -> Result<PalindromicPolynomial> {
    let flavor = file.flavor()?;
    let a = file.required("A")?.to_matrix()?;
    let q = file.required("Q")?.to_matrix()?;
    PalindromicPolynomial::new(flavor, a, q)
}

fn complex_list(raw: &[[f64; 2]]) -> Vec<C64> {
    raw.iter().map(|&[r, i]| C64::new(r, i)).collect()
}

fn cmd_eig(args: &CommonArgs) -> Result<Report> {
    let file = ProblemFile::load(&args.file)?;
    let tol = tolerances(args, &file)?;
    let poly = load_poly(&file)?;
    let pairs = qep_eigensolve(&poly)?;
    let mut report = Report::default();
    report.push("flavor", file.flavor()?.code());
    report.push("n", poly.dim());
    let mut worst = 0.0_f64;
    for (k, p) in pairs.iter().enumerate() {
        report.push(
            &format!("eigenvalue.{k}.re"),
            format!("{:.12e}", p.value.re),
        );
        report.push(
            &format!("eigenvalue.{k}.im"),
            format!("{:.12e}", p.value.im),
        );
        let r = pair_residual(&poly, p);
        report.push_f(&format!("eigenvalue.{k}.residual"), r);
        let bound = frob(poly.a()) * (1.0 + p.value.norm_sqr()) + frob(poly.q()) * p.value.norm();
        worst = worst.max(r / bound.max(1e-300));
    }
    let vals: Vec<C64> = pairs.iter().map(|p| p.value).collect();
    let pairing = classify_spectrum(&vals, poly.flavor, tol.tol_pair().max(1e-6)).is_ok();
    report.push("pairing", if pairing { "closed" } else { "violated" });
    report.push_f("residual.max_relative", worst);
    let pass = pairing && worst <= tol.residual_gate().max(1e-8);
    report.push("verdict", if pass { "pass" } else { "fail" });
    Ok(report)
}

fn cmd_qiep(args: &CommonArgs) -> Result<Report> {
    let file = ProblemFile::load(&args.file)?;
    let tol = tolerances(args, &file)?;
    let flavor = file.flavor()?;
    let raw = file
        .eigenvalues
        .as_ref()
        .ok_or_else(|| PqepError::DimensionMismatch("problem file lacks eigenvalues".into()))?;
    let eigs = complex_list(raw);
    let spec = classify_spectrum(&eigs, flavor, tol.tol_pair())?;
    let opts = QiepOptions {
        seed: args.seed.or(file.seed).unwrap_or(0),
        ..QiepOptions::default()
    };
    let sol = solve_qiep(&spec, flavor, &opts)?;
    let real = flavor.is_real();
    write_matrix(&args.out.join("A.json"), sol.poly.a(), real)?;
    write_matrix(&args.out.join("Q.json"), sol.poly.q(), real)?;
    write_matrix(&args.out.join("X.json"), &sol.x, real)?;
    write_matrix(&args.out.join("Lambda.json"), &sol.lambda, real)?;
    let res = residual(&sol.poly, &sol.x, &sol.lambda)?;
    let scale = frob(sol.poly.a()) + frob(sol.poly.q());
    let got: Vec<C64> = qep_eigensolve(&sol.poly)?.iter().map(|p| p.value).collect();
    let dev = pqep::spectrum::multiset_match_max_distance(&spec.eigenvalues(), &got);
    let mut report = Report::default();
    report.push("flavor", flavor.code());
    report.push("n", sol.poly.dim());
    report.push("seed", opts.seed);
    report.push_f("residual", res);
    report.push_f("residual.relative", res / scale.max(1e-300));
    report.push_f("spectrum.deviation", dev);
    report.push("outputs", args.out.join("{A,Q,X,Lambda}.json").display());
    let pass = res <= tol.residual_gate() * scale && dev <= 1e-6;
    report.push("verdict", if pass { "pass" } else { "fail" });
    Ok(report)
}

fn cmd_eep(args: &CommonArgs) -> Result<Report> {
    let file = ProblemFile::load(&args.file)?;
    let tol = tolerances(args, &file)?;
    let poly = load_poly(&file)?;
    let rep = file
        .replace
        .as_ref()
        .ok_or_else(|| PqepError::DimensionMismatch("problem file lacks replace".into()))?;
    let from = complex_list(&rep.from);
    let to = complex_list(&rep.to);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let req = request_from_replacement(&poly, &from, &to, seed, PhiChoice::Identity)?;
    let result = embed(&req)?;
    let real = poly.flavor.is_real();
    write_matrix(&args.out.join("A_new.json"), result.poly_new.a(), real)?;
    write_matrix(&args.out.join("Q_new.json"), result.poly_new.q(), real)?;
    write_matrix(&args.out.join("X1_new.json"), &result.x1_new, real)?;
    let scale = frob(result.poly_new.a()) + frob(result.poly_new.q());
    let qs = star_of(result.poly_new.q(), poly.flavor.star);
    let sdef = frob(
        &(&qs
            - &result
                .poly_new
                .q()
                .mapv(|z| z * pqep::mat::re(poly.flavor.eps()))),
    );
    let mut report = Report::default();
    report.push("flavor", poly.flavor.code());
    report.push("n", poly.dim());
    report.push("p", req.lambda1.nrows());
    report.push("seed", seed);
    report.push_f("residual.new_eigenpairs", result.report.new_residual);
    report.push_f("retained.max_deviation", result.report.retained_deviation);
    report.push_f("congruence.defect", result.report.gg8_defect);
    report.push("structure.exact", sdef == 0.0);
    report.push(
        "outputs",
        args.out.join("{A_new,Q_new,X1_new}.json").display(),
    );
    let pass = result.report.new_residual <= tol.residual_gate() * scale
        && result.report.retained_deviation <= 1e-6
        && sdef == 0.0;
    report.push("verdict", if pass { "pass" } else { "fail" });
    Ok(report)
}

fn cmd_verify(args: &CommonArgs) -> Result<Report> {
    let file = ProblemFile::load(&args.file)?;
    let tol = tolerances(args, &file)?;
    let poly = load_poly(&file)?;
    let x = file.required("X")?.to_matrix()?;
    let j = file.required("J")?.to_matrix()?;
    let mut report = Report::default();
    report.push("flavor", poly.flavor.code());
    if let Some(g) = &file.gamma {
        // verify the claimed Gamma directly
        let gamma = ParameterMatrix::new(g.to_matrix()?, poly.flavor)?;
        let pair_res = residual(&poly, &x, &j)?;
        let mem = gamma_membership(&gamma.gamma, &j, poly.flavor, tol.residual_gate())?;
        let ann = frob(&x.dot(&gamma.gamma).dot(&star_of(&x, poly.flavor.star)));
        let back = pqep::decomposition::reconstruct(&x, &j, &gamma)?;
        let ra = frob(&(back.a() - poly.a())) / frob(poly.a()).max(1e-300);
        let rq = frob(&(back.q() - poly.q())) / frob(poly.q()).max(1e-300);
        report.push_f("pair_residual", pair_res);
        report.push_f("gamma.skew_defect", mem.skew_defect);
        report.push_f("gamma.intertwine_defect", mem.intertwine_defect);
        report.push_f("gamma.annihilation", ann);
        report.push_f("roundtrip.A", ra);
        report.push_f("roundtrip.Q", rq);
        let scale =
            (frob(poly.a()) + frob(poly.q())) * frob(&x).max(1e-300) * frob(&j).max(1.0).powi(2);
        let pass = pair_res <= tol.residual_gate() * scale && mem.pass && ra <= 1e-8 && rq <= 1e-8;
        report.push("verdict", if pass { "pass" } else { "fail" });
    } else {
        let rep = pqep::decomposition::verify_decomposition(&poly, &x, &j, tol.residual_gate())?;
        report.push_f("pair_residual", rep.pair_residual);
        report.push_f("gamma.skew_defect", rep.membership.skew_defect);
        report.push_f("gamma.intertwine_defect", rep.membership.intertwine_defect);
        report.push_f("gamma.annihilation", rep.annihilation);
        report.push_f("roundtrip.A", rep.roundtrip_a);
        report.push_f("roundtrip.Q", rep.roundtrip_q);
        report.push("verdict", if rep.pass { "pass" } else { "fail" });
    }
    Ok(report)
}
