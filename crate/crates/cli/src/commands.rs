use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use hodge_spectra::assembly::{build_problem, export_pencil, true_dirichlet_cross_check, BcKind};
use hodge_spectra::eigen::{classify_eigenforms, solve as solve_pencil, SolveOptions};
use hodge_spectra::mesh::{generate, read_mesh, write_mesh};
use hodge_spectra::verify::{
    check_decomposition, check_harmonic_count, check_inequality, closed_family, closed_form_spectrum,
    decomposition_references, match_spectra, nonzero_reference, DecompositionReferences, IndexMap, OracleKind,
    OrderedSpectrum, Status, VerificationReport,
};
use hodge_spectra::{CanonicalDomain, DeRham, Pencil, SimplicialComplex, Spectrum};

use crate::args::{default_degree, CheckKind, ConvergenceArgs, DomainArgs, MeshArgs, ProblemArgs, SolveArgs, VerifyArgs};
use crate::report::Report;
use crate::Exit;

fn domain_of(args: &DomainArgs) -> Result<CanonicalDomain> {
    let d = args.canonical().ok_or_else(|| anyhow!("one of --domain or --mesh is required"))?;
    d.validate()?;
    Ok(d)
}

fn load_mesh(args: &ProblemArgs) -> Result<SimplicialComplex> {
    if let Some(path) = &args.mesh {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(read_mesh(&text)?);
    }
    let d = domain_of(&args.domain)?;
    let res = args.res.ok_or_else(|| anyhow!("--res is required with --domain"))?;
    Ok(generate(d, res)?)
}

/// Solves and, where defined, classifies the spectrum.
fn spectrum(complex: &SimplicialComplex, bc: BcKind, p: usize, count: usize, seed: u64, tol: f64) -> Result<(Pencil, Spectrum)> {
    let problem = build_problem::<f64>(complex, bc, p)?;
    let opts = SolveOptions { count, seed, tol, ..SolveOptions::default() };
    let mut result = solve_pencil(&problem, &opts)?;
    if matches!(bc, BcKind::Absolute | BcKind::ScalarDirichlet | BcKind::ScalarNeumann) {
        let de_rham = DeRham::new(complex)?;
        classify_eigenforms(&mut result, &problem, &de_rham)?;
    }
    Ok((problem, result))
}

fn exit_of(status: Status) -> Exit {
    match status {
        Status::Pass => Exit::Ok,
        Status::Fail => Exit::Fail,
        Status::Exploratory => Exit::Exploratory,
    }
}

pub fn mesh(args: &MeshArgs) -> Result<Exit> {
    let d = domain_of(&args.domain)?;
    let complex = generate(d, args.res)?;
    std::fs::write(&args.out, write_mesh(&complex)).with_context(|| format!("writing {}", args.out.display()))?;
    let counts = complex.counts();
    let betti = complex.betti_numbers();
    println!("domain {}", d.name());
    println!("dim {}", complex.dim());
    println!("simplices {}", counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    println!("h {}", complex.mesh_size());
    println!("chi {}", complex.euler_characteristic());
    println!("betti {}", betti.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    Ok(Exit::Ok)
}

pub fn solve(args: &SolveArgs) -> Result<Exit> {
    let pa = &args.problem;
    let complex = load_mesh(pa)?;
    let (problem, result) = spectrum(&complex, args.bc, pa.degree_for(args.bc), args.count, pa.seed, pa.solver_tol)?;
    if let Some(dir) = &args.export {
        std::fs::create_dir_all(dir)?;
        export_pencil(&problem, dir, "problem")?;
    }
    let mut report = Report::new("solve", &complex, pa.seed).with_spectrum(&result);
    report.param("count", args.count);
    report.param("solver_tol", pa.solver_tol);
    report.param("shift", result.shift);
    report.param("harmonic_threshold", result.harmonic_threshold);
    report.param("dof", problem.dof());
    report.write(args.out.as_deref())?;
    Ok(Exit::Ok)
}

pub fn verify(args: &VerifyArgs) -> Result<Exit> {
    let pa = &args.problem;
    let (complex, rep) = match args.check {
        CheckKind::Inequality => return inequality(args),
        CheckKind::Decomposition => {
            let complex = load_mesh(pa)?;
            let (_, result) = spectrum(&complex, BcKind::Absolute, pa.degree(), args.k, pa.seed, pa.solver_tol)?;
            let refs = match complex.origin() {
                Some((d, _)) => decomposition_references(&d, pa.degree(), args.k),
                None => DecompositionReferences::default(),
            };
            let rep = check_decomposition(&result, args.k, args.tol, &refs)?;
            (complex, with_result(rep, result))
        }
        CheckKind::TopDegree => {
            let complex = load_mesh(pa)?;
            (complex.clone(), top_degree(&complex, args)?)
        }
        CheckKind::HarmonicCount => {
            let complex = load_mesh(pa)?;
            let expected = *complex.betti_numbers().get(pa.degree()).ok_or_else(|| anyhow!("degree exceeds dimension"))? as usize;
            let count = args.k.max(expected + 2);
            let (_, result) = spectrum(&complex, BcKind::Absolute, pa.degree(), count, pa.seed, pa.solver_tol)?;
            let rep = check_harmonic_count(&result, expected);
            eprintln!("harmonic count {} (expected {expected})", result.harmonic_count);
            (complex, with_result(rep, result))
        }
        CheckKind::TrueDirichlet => {
            let complex = load_mesh(pa)?;
            (complex.clone(), true_dirichlet(&complex, args)?)
        }
    };
    let (rep, result) = rep;
    let mut report = Report::new(&format!("verify {}", args.check.as_str()), &complex, pa.seed);
    if let Some(r) = &result {
        report = report.with_spectrum(r);
    }
    report.degree = result.as_ref().map_or(pa.degree(), |r| r.degree);
    report.param("K", args.k);
    report.param("tol", args.tol);
    report.param("solver_tol", pa.solver_tol);
    let status = rep.status;
    eprintln!("{}: {}", args.check.as_str(), status.as_str());
    report.add_check(rep);
    report.write(args.out.as_deref())?;
    Ok(exit_of(status))
}

type Checked = (VerificationReport, Option<Spectrum>);

fn with_result(rep: VerificationReport, result: Spectrum) -> Checked {
    (rep, Some(result))
}

fn top_degree(complex: &SimplicialComplex, args: &VerifyArgs) -> Result<Checked> {
    let pa = &args.problem;
    let n = complex.dim();
    let (_, result) = spectrum(complex, BcKind::Absolute, n, args.k, pa.seed, pa.solver_tol)?;
    let computed = OrderedSpectrum::of_result(&result);
    let mut rep = VerificationReport::new("top_degree").with_param("K", args.k as f64).with_param("tol", args.tol);
    let mut tags = VerificationReport::new("tags_closed");
    if let Some(i) = result.tags.iter().position(|t| !matches!(t, hodge_spectra::FormTag::Closed | hodge_spectra::FormTag::Harmonic)) {
        tags.status = Status::Fail;
        tags.notes.push(format!("eigenpair {} tagged {}", i + 1, result.tags[i].as_str()));
    }
    rep.absorb(tags);
    let oracle = complex.origin().and_then(|(d, _)| closed_form_spectrum(&d, OracleKind::Dirichlet, args.k).ok());
    match oracle {
        Some(o) => {
            let mut m = match_spectra(&computed, &o, args.tol, args.k)?;
            m.name = "vs_dirichlet_oracle".into();
            rep.absorb(m);
        }
        None => {
            let (_, scalar) = spectrum(complex, BcKind::ScalarDirichlet, 0, args.k, pa.seed, pa.solver_tol)?;
            let mut m = match_spectra(&computed, &OrderedSpectrum::of_result(&scalar), args.tol, args.k)?;
            m.name = "vs_scalar_dirichlet".into();
            rep.absorb(m.exploratory("no closed-form reference; compared with the discrete scalar Dirichlet spectrum"));
        }
    }
    if complex.origin().is_some_and(|(d, _)| !d.has_regular_boundary()) {
        rep = rep.exploratory("domain has a re-entrant corner");
    }
    Ok((rep, Some(result)))
}

fn true_dirichlet(complex: &SimplicialComplex, args: &VerifyArgs) -> Result<Checked> {
    let pa = &args.problem;
    let (problem, result) = spectrum(complex, BcKind::TrueDirichlet, pa.degree(), args.k, pa.seed, pa.solver_tol)?;
    let copies = problem.dof_map.components;
    let scalar_count = args.k.div_ceil(copies);
    let (_, scalar) = spectrum(complex, BcKind::ScalarDirichlet, 0, scalar_count, pa.seed, pa.solver_tol)?;
    let computed = OrderedSpectrum::of_result(&result);
    let mut rep = VerificationReport::new("true_dirichlet")
        .with_param("K", args.k as f64)
        .with_param("tol", args.tol)
        .with_param("copies", copies as f64);
    let mut m = match_spectra(&computed, &OrderedSpectrum::of_result(&scalar).repeated(copies), args.tol, args.k)?;
    m.name = "vs_scalar_copies".into();
    rep.absorb(m);
    if let Some((d, _)) = complex.origin() {
        if let Some(o) = nonzero_reference(&d, BcKind::TrueDirichlet, pa.degree(), args.k)? {
            let mut m = match_spectra(&computed, &o, args.tol, args.k)?;
            m.name = "vs_oracle_copies".into();
            rep.absorb(m);
        }
    }
    let identity = true_dirichlet_cross_check(complex, pa.degree(), args.samples, pa.seed)?;
    let mut cross = VerificationReport::new("operator_identity").with_param("samples", args.samples as f64);
    cross.worst_dev = identity;
    if !(identity <= 1e-10) {
        cross.status = Status::Fail;
        cross.notes.push(format!("||A_full x - A_block x|| / ||x|| = {identity:e}"));
    }
    rep.absorb(cross);
    Ok((rep, Some(result)))
}

fn inequality(args: &VerifyArgs) -> Result<Exit> {
    let pa = &args.problem;
    let computed = pa.res.is_some() || pa.mesh.is_some();
    let slack = args.slack.unwrap_or(if computed { 0.02 } else { 0.0 });
    let m_max = args.k;
    let (theta, lambda, map, complex) = if computed {
        let complex = load_mesh(pa)?;
        let n = complex.dim();
        let (theta, map) = match args.shift {
            Some(s) => {
                let (_, mu) = spectrum(&complex, BcKind::ScalarNeumann, 0, m_max + s, pa.seed, pa.solver_tol)?;
                (OrderedSpectrum::of_result(&mu), IndexMap::Shift(s))
            }
            None => {
                let map = IndexMap::Dimension(n);
                let need = map.index(m_max);
                let theta = if n == 3 {
                    let (_, t) = spectrum(&complex, BcKind::CurlcurlRelative, 1, need, pa.seed, pa.solver_tol)?;
                    OrderedSpectrum::of_result(&t)
                } else {
                    let (_, mu) = spectrum(&complex, BcKind::ScalarNeumann, 0, need + 1, pa.seed, pa.solver_tol)?;
                    OrderedSpectrum::of_result(&mu).skip(mu.harmonic_count)
                };
                (theta, map)
            }
        };
        let (_, lam) = spectrum(&complex, BcKind::ScalarDirichlet, 0, m_max, pa.seed, pa.solver_tol)?;
        (theta, OrderedSpectrum::of_result(&lam), map, complex)
    } else {
        let d = domain_of(&pa.domain)?;
        let n = d.dim();
        let (theta, map) = match args.shift {
            Some(s) => (closed_form_spectrum(&d, OracleKind::Neumann, m_max + s)?, IndexMap::Shift(s)),
            None => {
                let map = IndexMap::Dimension(n);
                let theta = closed_family(&d, n - 1, map.index(m_max)).ok_or_else(|| anyhow!("no closed-form spectrum on {}", d.name()))?;
                (theta, map)
            }
        };
        let lambda = closed_form_spectrum(&d, OracleKind::Dirichlet, m_max)?;
        // a small reference mesh only for provenance fields
        let complex = generate(d, 2)?;
        (theta, lambda, map, complex)
    };
    let mut rep = check_inequality(&theta, &lambda, map, m_max, slack)?;
    rep.parameters.insert("computed".into(), if computed { 1.0 } else { 0.0 });
    let mut report = Report::new("verify inequality", &complex, pa.seed);
    if !computed {
        report.h = 0.0;
        report.mesh_hash = String::new();
    }
    report.param("K", m_max);
    report.param("slack", slack);
    report.param("source", if computed { "computed" } else { "oracle" });
    report.param("theta", theta.values.clone());
    report.param("lambda", lambda.values.clone());
    let status = rep.status;
    match &rep.first_violation {
        Some(v) => eprintln!("inequality: {} at m = {} ({} > {})", status.as_str(), v.index, v.value, v.reference),
        None => eprintln!("inequality: {} (worst ratio - 1 = {:.4})", status.as_str(), rep.worst_dev),
    }
    report.add_check(rep);
    report.write(args.out.as_deref())?;
    Ok(exit_of(status))
}

pub fn convergence(args: &ConvergenceArgs) -> Result<Exit> {
    let d = domain_of(&args.domain)?;
    if args.count == 0 {
        bail!("--count must be positive");
    }
    let degree = default_degree(args.degree, args.bc);
    let oracle = nonzero_reference(&d, args.bc, degree, args.count)?;
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    for &res in &args.resolutions {
        let complex = generate(d, res)?;
        let kernel = match args.bc {
            BcKind::Absolute => complex.betti_numbers()[degree] as usize,
            BcKind::ScalarNeumann => complex.betti_numbers()[0] as usize,
            _ => 0,
        };
        let problem = build_problem::<f64>(&complex, args.bc, degree)?;
        let opts = SolveOptions { count: args.count + kernel, seed: args.seed, ..SolveOptions::default() };
        let result = solve_pencil(&problem, &opts)?;
        let values: Vec<f64> = result.values_f64().into_iter().skip(result.harmonic_count).take(args.count).collect();
        rows.push((complex.mesh_size(), values));
    }
    let mut csv = String::from("h,index,computed,oracle,rel_err,order\n");
    for (r, (h, values)) in rows.iter().enumerate() {
        for (i, &v) in values.iter().enumerate() {
            let exact = oracle.as_ref().and_then(|o| o.values.get(i).copied());
            let err = |row: usize| -> Option<f64> {
                let (_, vals) = rows.get(row)?;
                let x = *vals.get(i)?;
                exact.map(|e| (x - e).abs() / e.abs())
            };
            let order = || -> Option<f64> {
                if r == 0 {
                    return None;
                }
                let ratio = (rows[r - 1].0 / h).ln();
                if exact.is_some() {
                    return Some((err(r - 1)? / err(r)?).ln() / ratio);
                }
                if r < 2 {
                    return None;
                }
                // three-level estimate without a reference value
                let v = |row: usize| rows[row].1.get(i).copied();
                let (a, b, c) = (v(r - 2)?, v(r - 1)?, v(r)?);
                Some(((a - b).abs() / (b - c).abs()).ln() / ratio)
            };
            let order = order();
            let fmt = |x: Option<f64>| x.map(|x| format!("{x:.12e}")).unwrap_or_default();
            writeln!(csv, "{h:.12e},{},{v:.12e},{},{},{}", i + 1, fmt(exact), fmt(err(r)), fmt(order))?;
        }
    }
    match &args.out {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(Exit::Ok)
}
