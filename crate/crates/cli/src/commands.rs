use std::path::Path;

use staeckel::operators::{
    check_commutation, check_self_adjoint, quantize, quantize_with_potentials, QuadratureSpec,
};
use staeckel::report::{render_table, ReportBuilder, RunReport};
use staeckel::separation::{separate as solve_axes, verify_eigen_with, EigenOptions, EnergyVector};
use staeckel::staeckel::{
    check_benenti, check_identity_eq6, check_involution, check_involution_with_potentials,
    hamiltonians, potentials,
};
use staeckel::{gallery, Expr, Report};

use crate::spec::{LoadError, System, SystemSpec, Tolerances};
use crate::{Check, SystemArgs};

pub const PASS: u8 = 0;
pub const FAIL: u8 = 1;
pub const USAGE: u8 = 2;

fn load(args: &SystemArgs) -> Result<System, LoadError> {
    let mut system = match (&args.spec, &args.case) {
        (Some(path), _) => {
            let name = path
                .file_stem()
                .map_or("spec".into(), |s| s.to_string_lossy().into_owned());
            SystemSpec::load(path)?.into_system(name)?
        }
        (None, Some(case)) => System::from_case_name(case)?,
        (None, None) => unreachable!("clap requires --spec or --case"),
    };
    if let Some(k) = args.samples {
        system.domain = system.domain.with_samples(k)?;
    }
    if let Some(seed) = args.seed {
        system.domain = system.domain.with_seed(seed);
    }
    if let Some(tol) = args.tol {
        system.tolerances = Tolerances::uniform(tol);
    }
    Ok(system)
}

/// Prints reports as rows of one table, header first.
struct Stream {
    started: bool,
}

impl Stream {
    fn new() -> Self {
        Self { started: false }
    }

    fn emit(&mut self, r: &Report) {
        let table = render_table(std::slice::from_ref(r));
        let skip = usize::from(self.started);
        for line in table.lines().skip(skip) {
            println!("{line}");
        }
        self.started = true;
    }
}

fn check_name(c: Check) -> &'static str {
    match c {
        Check::Involution => "involution",
        Check::Eq6 => "eq6",
        Check::Commute => "commute",
        Check::Selfadjoint => "selfadjoint",
        Check::Benenti => "benenti",
    }
}

fn tolerance(t: &Tolerances, c: Check) -> f64 {
    match c {
        Check::Involution => t.involution,
        Check::Eq6 => t.eq6,
        Check::Commute => t.commute,
        Check::Selfadjoint => t.selfadjoint,
        Check::Benenti => t.benenti,
    }
}

fn run_check(s: &System, c: Check, tol: f64) -> staeckel::Result<Report> {
    let (m, d) = (&s.matrix, &s.domain);
    match c {
        Check::Involution => match &s.potential {
            Some(v) => check_involution_with_potentials(m, v, d, tol),
            None => check_involution(m, d, tol),
        },
        Check::Eq6 => check_identity_eq6(m, d, tol),
        Check::Commute => {
            let ops = match &s.potential {
                Some(v) => quantize_with_potentials(m, v, d)?,
                None => quantize(m, d)?,
            };
            check_commutation(&ops, d, tol)
        }
        Check::Selfadjoint => {
            let phi = m.determinant();
            let mut out = ReportBuilder::new("selfadjoint", tol);
            for (a, op) in quantize(m, d)?.iter().enumerate() {
                let r = check_self_adjoint(op, &phi, d, QuadratureSpec::default(), tol)?;
                out.push(format!("H{}", a + 1), r.max_residual, r.witness);
            }
            Ok(out.finish())
        }
        Check::Benenti => {
            let n = m.dim();
            let us = match &s.potential {
                Some(v) => potentials(m, v, d)?,
                None => vec![Expr::zero(); n],
            };
            let hams: Vec<_> = hamiltonians(m, d)?
                .iter()
                .zip(us)
                .map(|(h, u)| h.with_potential(u))
                .collect();
            let mut out = ReportBuilder::new("benenti", tol);
            for a in 0..n {
                for b in a + 1..n {
                    let r = check_benenti(&hams[a], &hams[b], d, tol)?;
                    for f in r.findings {
                        out.push(
                            format!("H{},H{} {}", a + 1, b + 1, f.label),
                            f.residual,
                            f.witness,
                        );
                    }
                }
            }
            Ok(out.finish())
        }
    }
}

fn write_json(path: Option<&Path>, run: &RunReport) -> bool {
    let Some(path) = path else { return true };
    match std::fs::write(path, run.to_json() + "\n") {
        Ok(()) => true,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", path.display());
            false
        }
    }
}

/// `checks` came from the default set when `implicit` is true; checks that
/// cannot apply to the system are then skipped instead of rejected.
pub fn verify(args: &SystemArgs, checks: &[Check], implicit: bool) -> u8 {
    let system = match load(args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    let n = system.matrix.dim();
    let too_large = n > staeckel::operators::MAX_QUADRATURE_DIM;
    if too_large && !implicit && checks.contains(&Check::Selfadjoint) {
        eprintln!(
            "error: selfadjoint needs n <= {}, the system has n = {n}",
            staeckel::operators::MAX_QUADRATURE_DIM
        );
        return USAGE;
    }
    let mut stream = Stream::new();
    let mut reports = Vec::new();
    for &c in checks {
        if c == Check::Selfadjoint && too_large {
            eprintln!("note: selfadjoint skipped for n = {n}");
            continue;
        }
        let tol = tolerance(&system.tolerances, c);
        let r = run_check(&system, c, tol)
            .unwrap_or_else(|e| Report::error(check_name(c), tol, e.to_string()));
        stream.emit(&r);
        reports.push(r);
    }
    let run = RunReport {
        command: "verify".into(),
        subject: system.name.clone(),
        seed: system.domain.seed(),
        samples: system.domain.samples(),
        reports,
    };
    if !write_json(args.json.as_deref(), &run) {
        return USAGE;
    }
    if run.passed() {
        PASS
    } else {
        FAIL
    }
}

pub fn separate(
    args: &SystemArgs,
    energy: Option<Vec<f64>>,
    steps: usize,
    export: Option<&Path>,
) -> u8 {
    let system = match load(args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    let n = system.matrix.dim();
    let energy = match energy {
        Some(e) if e.len() != n => {
            eprintln!("error: --energy needs {n} values, got {}", e.len());
            return USAGE;
        }
        Some(e) => match EnergyVector::new(e) {
            Ok(e) => e,
            Err(err) => {
                eprintln!("error: {err}");
                return USAGE;
            }
        },
        None => match system.energy.clone() {
            Some(e) => e,
            None => {
                eprintln!("error: separate needs energies: pass --energy E1,...,En or set `energy` in the spec");
                return USAGE;
            }
        },
    };
    if steps < staeckel::separation::MIN_STEPS {
        eprintln!(
            "error: --steps must be at least {}",
            staeckel::separation::MIN_STEPS
        );
        return USAGE;
    }
    let v = system
        .potential
        .clone()
        .unwrap_or_else(|| vec![Expr::zero(); n]);
    let t = system.tolerances;
    let opts = EigenOptions {
        steps,
        tol: t.eigen,
        uncoupling_tol: t.uncoupling,
        init: None,
    };
    let report = verify_eigen_with(&system.matrix, &v, &energy, &system.domain, &opts)
        .unwrap_or_else(|e| Report::error("eigen", t.eigen, e.to_string()));
    Stream::new().emit(&report);

    if let Some(dir) = export {
        let written =
            solve_axes(&system.matrix, &v, &energy, &system.domain, steps, None).map(|sol| {
                std::fs::create_dir_all(dir).and_then(|()| {
                    sol.product
                        .axes()
                        .iter()
                        .enumerate()
                        .try_for_each(|(k, axis)| {
                            std::fs::write(
                                dir.join(format!("axis{}.csv", k + 1)),
                                axis.to_delimited(),
                            )
                        })
                })
            });
        match written {
            Ok(Ok(())) => {}
            Ok(Err(e)) => {
                eprintln!("error: cannot export to {}: {e}", dir.display());
                return USAGE;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return FAIL;
            }
        }
    }
    let run = RunReport {
        command: "separate".into(),
        subject: system.name.clone(),
        seed: system.domain.seed(),
        samples: system.domain.samples(),
        reports: vec![report],
    };
    if !write_json(args.json.as_deref(), &run) {
        return USAGE;
    }
    if run.passed() {
        PASS
    } else {
        FAIL
    }
}

/// Accepts a full run document or a bare list of reports.
pub fn report(path: &Path) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return USAGE;
        }
    };
    let reports = match RunReport::from_json(&text) {
        Ok(run) => {
            println!(
                "{} {} (seed {}, {} samples)",
                run.command, run.subject, run.seed, run.samples
            );
            run.reports
        }
        Err(first) => match serde_json::from_str::<Vec<Report>>(&text) {
            Ok(list) => list,
            Err(_) => {
                eprintln!("error: {} is not a report: {first}", path.display());
                return USAGE;
            }
        },
    };
    print!("{}", render_table(&reports));
    PASS
}

pub fn gallery_list() -> u8 {
    for (name, description) in gallery::list() {
        println!("{name:<24} {description}");
    }
    PASS
}
