//! Subcommands other than `tm`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use dpx::corpus::{self, CorpusEntry};
use dpx::deduction::{check_derivation, derive_dk, parse_derivation, NjDerivation};
use dpx::extract::{extract_bm, extract_choice, extract_slash, Certificate, ExtractError, ExtractionResult};
use dpx::horn::{
    horn_satisfiability, id_check, parse_clause_file, parse_sequent_file, validate_cut_deduction, CutDeduction,
    HornOutcome,
};
use dpx::normalize::{default_fuel, harrop_normalize, normalization_report, NormalizeError};
use dpx::oracle::ipc_valid;
use dpx::slash::{build_ida_base, SlashEvaluator};
use dpx::syntax::{parse_cedent, parse_formula, parse_sequent, spd_enumerate, ChoiceVector};

use crate::io::{output_path, read_text, write_atomic, Failure, BOUNDEDNESS, FUEL, PRECONDITION, USAGE};
use crate::{Cli, MethodArg};

pub fn load_derivation(path: &Path) -> Result<NjDerivation, Failure> {
    parse_derivation(&read_text(path)?).map_err(|e| Failure::precondition(format!("{}: {e}", path.display())))
}

fn extract_failure(e: ExtractError) -> Failure {
    Failure::new(e.exit_code(), e.to_string())
}

/// Writes the certificate, reads it back and validates the copy.
pub fn write_certificate(path: &Path, r: &ExtractionResult) -> Result<(), Failure> {
    write_atomic(path, &r.certificate.to_text())?;
    let back = read_text(path)?;
    let ok = match &r.certificate {
        Certificate::Cut(_) => CutDeduction::parse_certificate(&back)
            .map(|cd| validate_cut_deduction(&cd, &r.base_used, &r.target))
            .unwrap_or(false),
        Certificate::Derivation(_) => parse_derivation(&back)
            .map(|d| d.conclusion() == &r.target && check_derivation(&d).is_ok())
            .unwrap_or(false),
    };
    if ok {
        Ok(())
    } else {
        Err(Failure::precondition(format!("{}: written certificate does not validate", path.display())))
    }
}

fn write_derivation(path: &Path, d: &NjDerivation) -> Result<(), Failure> {
    write_atomic(path, &format!("{d}\n"))?;
    let back = load_derivation(path)?;
    if &back == d && check_derivation(&back).is_ok() {
        Ok(())
    } else {
        Err(Failure::precondition(format!("{}: written derivation does not re-check", path.display())))
    }
}

pub fn check(file: &Path, out: &mut Vec<String>) -> Result<i32, Failure> {
    let d = load_derivation(file)?;
    check_derivation(&d).map_err(|e| Failure::precondition(e.to_string()))?;
    out.push("ok".into());
    out.push(d.conclusion().to_string());
    Ok(0)
}

pub fn extract(
    method: MethodArg,
    choices: Option<&str>,
    dest: Option<&Path>,
    file: &Path,
    out: &mut Vec<String>,
) -> Result<i32, Failure> {
    let d = load_derivation(file)?;
    let r = match choices {
        None => match method {
            MethodArg::Bm => extract_bm(&d),
            MethodArg::Slash => extract_slash(&d),
        },
        Some(bits) => {
            let k: ChoiceVector = bits.parse().map_err(|e| Failure::new(USAGE, format!("--choices: {e}")))?;
            match method {
                MethodArg::Bm => extract_choice(&d, &k),
                MethodArg::Slash => {
                    check_derivation(&d).map_err(|e| Failure::precondition(e.to_string()))?;
                    let e = spd_enumerate(d.antecedent());
                    if e.count() != k.len() {
                        return Err(Failure::precondition(format!(
                            "choice vector has {} bits, the antecedent has {} strictly positive disjunctions",
                            k.len(),
                            e.count()
                        )));
                    }
                    derive_dk(&d, &e, &k).map_err(ExtractError::from).and_then(|dk| extract_slash(&dk))
                }
            }
        }
    }
    .map_err(extract_failure)?;
    let path = output_path(dest, file, "cert");
    write_certificate(&path, &r)?;
    out.push(r.index.to_string());
    out.push(path.display().to_string());
    Ok(0)
}

pub fn normalize(fuel: Option<usize>, file: &Path, dest: Option<&Path>, out: &mut Vec<String>) -> Result<i32, Failure> {
    let d = load_derivation(file)?;
    check_derivation(&d).map_err(|e| Failure::precondition(e.to_string()))?;
    let fuel = fuel.unwrap_or_else(|| default_fuel(&d));
    let n = harrop_normalize(&d, fuel).map_err(|e| match e {
        NormalizeError::FuelExhausted { .. } => Failure::new(FUEL, e.to_string()),
        other => Failure::precondition(other.to_string()),
    })?;
    match dest {
        Some(path) => {
            write_derivation(path, &n.derivation)?;
            out.push(format!("steps {}", n.steps));
            out.push(path.display().to_string());
        }
        None => {
            out.push(format!("; steps {}", n.steps));
            out.push(n.derivation.to_string());
        }
    }
    Ok(0)
}

pub fn slash(
    base: Option<&Path>,
    derivation: Option<&Path>,
    context: Option<&str>,
    formula: &str,
    out: &mut Vec<String>,
) -> Result<i32, Failure> {
    let syntax = |what: &str, e: dpx::syntax::ParseError| Failure::precondition(format!("{what}: {e}"));
    let (set, default_context) = match (base, derivation) {
        (Some(b), None) => {
            let set = parse_sequent_file(&read_text(b)?)
                .map_err(|(line, e)| Failure::precondition(format!("{}:{line}: {e}", b.display())))?;
            (set, None)
        }
        (None, Some(p)) => {
            let d = load_derivation(p)?;
            check_derivation(&d).map_err(|e| Failure::precondition(e.to_string()))?;
            (build_ida_base(&d), Some(d.antecedent().clone()))
        }
        _ => return Err(Failure::new(USAGE, "give exactly one of --base and --derivation")),
    };
    let ctx = match (context, default_context) {
        (Some(c), _) => parse_cedent(c).map_err(|e| syntax("context", e))?,
        (None, Some(c)) => c,
        (None, None) => dpx::syntax::Cedent::empty(),
    };
    let f = parse_formula(formula).map_err(|e| syntax("formula", e))?;
    let j = SlashEvaluator::new(&set).judge(&ctx, &f);
    out.push(if j.holds { "holds" } else { "fails" }.into());
    for (sub, v) in &j.trace {
        out.push(format!("{v} {sub}"));
    }
    Ok(0)
}

pub fn horn(file: &Path, out: &mut Vec<String>) -> Result<i32, Failure> {
    let set = parse_clause_file(&read_text(file)?).map_err(|e| Failure::precondition(format!("{}: {e}", file.display())))?;
    match horn_satisfiability(&set) {
        HornOutcome::Satisfiable { model } => {
            out.push("sat".into());
            out.extend(model.iter().map(|a| a.to_string()));
        }
        HornOutcome::Refuted(trace) => {
            out.push("unsat".into());
            for s in &trace.steps {
                out.push(format!("round {} unit {} clause {}", s.round, s.unit, s.reason));
            }
            out.push(format!("empty clause {}", trace.empty_clause));
        }
    }
    Ok(0)
}

pub fn idcheck(base: &Path, target: &str, dest: Option<&Path>, out: &mut Vec<String>) -> Result<i32, Failure> {
    let set = parse_sequent_file(&read_text(base)?)
        .map_err(|(line, e)| Failure::precondition(format!("{}:{line}: {e}", base.display())))?;
    let target = parse_sequent(target).map_err(|e| Failure::precondition(format!("target: {e}")))?;
    match id_check(&set, &target) {
        Some(cd) => {
            let path = output_path(dest, base, "cert");
            write_atomic(&path, &cd.to_certificate())?;
            let back = CutDeduction::parse_certificate(&read_text(&path)?)
                .map_err(|e| Failure::precondition(format!("{}: {e}", path.display())))?;
            if !validate_cut_deduction(&back, &set, &target) {
                return Err(Failure::precondition(format!("{}: written certificate does not validate", path.display())));
            }
            out.push("yes".into());
            out.push(path.display().to_string());
        }
        None => out.push("no".into()),
    }
    Ok(0)
}

pub fn spd(cedent: &str, out: &mut Vec<String>) -> Result<i32, Failure> {
    let g = parse_cedent(cedent).map_err(|e| Failure::precondition(format!("cedent: {e}")))?;
    let e = spd_enumerate(&g);
    out.push(format!("count {}", e.count()));
    for (i, f) in e.basis.iter().enumerate() {
        out.push(format!("formula {i} {f}"));
    }
    for (j, occ) in e.occurrences.iter().enumerate() {
        let sub = e.basis[occ.formula_index].subformula(&occ.steps).expect("enumerated path");
        out.push(format!("{j} {occ} {sub}"));
    }
    Ok(0)
}

pub fn oracle(sequent: &str, cap: usize, out: &mut Vec<String>) -> Result<i32, Failure> {
    let s = parse_sequent(sequent).map_err(|e| Failure::precondition(format!("sequent: {e}")))?;
    let v = ipc_valid(&s, cap).map_err(|e| Failure::precondition(e.to_string()))?;
    out.push(if v.valid { "valid" } else { "invalid" }.into());
    Ok(if v.valid { 0 } else { 1 })
}

fn load_dir(dir: &Path) -> Result<Vec<CorpusEntry>, Failure> {
    let listing = std::fs::read_dir(dir).map_err(|e| Failure::precondition(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = listing
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "njp"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(CorpusEntry { name, derivation: load_derivation(&p)? })
        })
        .collect()
}

/// One line per entry; failures are reported on the line, not as an error.
fn run_entry(cli: &Cli, e: &CorpusEntry, dest: Option<&Path>) -> Result<String, (i32, String)> {
    let d = &e.derivation;
    check_derivation(d).map_err(|err| (PRECONDITION, err.to_string()))?;
    let bm = extract_bm(d).map_err(|err| (err.exit_code(), format!("bm: {err}")))?;
    let sl = extract_slash(d).map_err(|err| (err.exit_code(), format!("slash: {err}")))?;
    if !bm.validate() || !sl.validate() {
        return Err((PRECONDITION, "certificate rejected".into()));
    }
    match ipc_valid(&bm.target, cli.oracle_cap) {
        Ok(v) if v.valid => {}
        Ok(_) => return Err((PRECONDITION, format!("{} is not valid", bm.target))),
        Err(err) => return Err((PRECONDITION, err.to_string())),
    }
    let fuel = cli.fuel.unwrap_or_else(|| default_fuel(d));
    let rep = normalization_report(d, fuel).map_err(|err| match err {
        NormalizeError::FuelExhausted { .. } => (FUEL, err.to_string()),
        other => (PRECONDITION, other.to_string()),
    })?;
    if !rep.non_id.is_empty() {
        return Err((PRECONDITION, format!("normal form sequent {} is not i.d.", rep.non_id[0])));
    }
    if rep.intro_ending == Some(false) {
        return Err((PRECONDITION, "normal form does not end with an introduction".into()));
    }
    if let Some(dir) = dest {
        write_derivation(&dir.join(format!("{}.njp", e.name)), d).map_err(|f| (f.code, f.message))?;
        write_certificate(&dir.join(format!("{}.cert", e.name)), &bm).map_err(|f| (f.code, f.message))?;
    }
    Ok(format!("{} bm={} slash={} steps={} ok", e.name, bm.index, sl.index, rep.steps))
}

pub fn corpus_run(
    cli: &Cli,
    dir: Option<&Path>,
    count: usize,
    dest: Option<&Path>,
    out: &mut Vec<String>,
) -> Result<i32, Failure> {
    let entries = match dir {
        Some(d) => load_dir(d)?,
        None => corpus::standard(cli.seed, count),
    };
    let mut code = 0;
    let mut failures = BTreeSet::new();
    for e in &entries {
        match run_entry(cli, e, dest) {
            Ok(line) => out.push(line),
            Err((c, why)) => {
                code = code.max(c.min(BOUNDEDNESS).max(PRECONDITION));
                failures.insert(e.name.clone());
                out.push(format!("{} FAIL {why}", e.name));
            }
        }
    }
    out.push(format!("entries {} failures {}", entries.len(), failures.len()));
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("dpx-cmd-{}-{name}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn extract_writes_a_valid_certificate() {
        let dir = tmp("extract");
        let file = dir.join("d.njp");
        std::fs::write(&file, "(orI0 \"p => p | q\" (ax \"p => p\"))\n").unwrap();
        let mut out = Vec::new();
        assert_eq!(extract(MethodArg::Bm, None, None, &file, &mut out).unwrap(), 0);
        assert_eq!(out, vec!["0".to_string(), dir.join("d.cert").display().to_string()]);
        let mut out = Vec::new();
        assert_eq!(extract(MethodArg::Slash, Some(""), Some(&dir.join("s.cert")), &file, &mut out).unwrap(), 0);
        assert_eq!(out[0], "0");
        let e = extract(MethodArg::Bm, Some("1"), None, &file, &mut Vec::new()).unwrap_err();
        assert_eq!(e.code, PRECONDITION);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn check_reports_the_node() {
        let dir = tmp("check");
        let file = dir.join("bad.njp");
        std::fs::write(&file, "(orI0 \"_|_ => (p & q) | r\" (ax \"_|_ => p & q\"))").unwrap();
        let e = check(&file, &mut Vec::new()).unwrap_err();
        assert_eq!(e.code, PRECONDITION);
        assert!(e.message.contains("root.0"), "{}", e.message);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn normalize_output_reparses() {
        let dir = tmp("normalize");
        let file = dir.join("d.njp");
        std::fs::write(&file, corpus::handwritten().into_iter().find(|e| e.name == "conj_detour").unwrap().derivation.to_string())
            .unwrap();
        let mut out = Vec::new();
        normalize(None, &file, None, &mut out).unwrap();
        assert_eq!(out[0], "; steps 1");
        let d = parse_derivation(&out.join("\n")).unwrap();
        assert!(check_derivation(&d).is_ok());
        assert_eq!(normalize(Some(0), &file, None, &mut Vec::new()).unwrap_err().code, FUEL);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn small_commands() {
        let mut out = Vec::new();
        assert_eq!(oracle("=> p | ~p", 200, &mut out).unwrap(), 1);
        assert_eq!(oracle("p & q => q", 200, &mut out).unwrap(), 0);
        assert_eq!(out, vec!["invalid", "valid"]);
        let mut out = Vec::new();
        spd("p | q, r & (s | p)", &mut out).unwrap();
        assert_eq!(out[0], "count 2");
        let dir = tmp("small");
        let base = dir.join("base.seq");
        std::fs::write(&base, "p => q\nq => r\n").unwrap();
        let mut out = Vec::new();
        idcheck(&base, "p, s => r", None, &mut out).unwrap();
        assert_eq!(out[0], "yes");
        let mut out = Vec::new();
        idcheck(&base, "s => r", None, &mut out).unwrap();
        assert_eq!(out, vec!["no"]);
        let mut out = Vec::new();
        slash(Some(&base), None, Some("p"), "r", &mut out).unwrap();
        assert_eq!(out[0], "holds");
        let clauses = dir.join("h.cnf");
        std::fs::write(&clauses, "p\n-p q\n-q\n").unwrap();
        let mut out = Vec::new();
        horn(&clauses, &mut out).unwrap();
        assert_eq!(out[0], "unsat");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn corpus_run_is_deterministic() {
        let cli = Cli::try_parse_from(["dpx", "corpus", "run", "--count", "4"]).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        assert_eq!(corpus_run(&cli, None, 4, None, &mut a).unwrap(), 0);
        corpus_run(&cli, None, 4, None, &mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.last().unwrap(), "entries 16 failures 0");
    }
}
