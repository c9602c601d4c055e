use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use serde_json::{json, Value};

use forestalg::decide::{
    confusion_witness, decide_hom, nonconfusion, Certificate, ConfusionWitness, EfViolation, Fragment,
    NonconfusionReport, Verdict,
};
use forestalg::decompose::{decompose_ef, decompose_efex, StageKind};
use forestalg::defk::{definiteness_degree, definiteness_oracle, simk_equiv, NoneCriterion};
use forestalg::hom::{hom_from_file, isomorphism};
use forestalg::oracle::{brute_confused_pairs, TsetOracle};
use forestalg::{
    format, models, parse_forest, parse_formula, to_recognizer, Alphabet, AlgebraFile, Context, Forest,
    Homomorphism, Reachability, Recognizer,
};

use crate::report::Report;
use crate::Command;

pub fn parse_fragment(s: &str) -> Result<Fragment, String> {
    s.parse::<Fragment>().map_err(|e| e.to_string())
}

pub fn run(command: Command) -> Result<Report> {
    match command {
        Command::Check { file } => check(&file),
        Command::Eval { file, forest } => eval(&file, &forest),
        Command::Models { forest, formula } => models_cmd(&forest, &formula),
        Command::Compile {
            formula,
            alphabet,
            output,
        } => compile(&formula, alphabet.as_deref(), output.as_deref()),
        Command::Syntactic { file, output, iso } => syntactic(&file, output.as_deref(), iso.as_deref()),
        Command::Reach { file, dot } => reach(&file, dot),
        Command::Simk { k, s, t, oracle } => simk(k, &s, &t, oracle),
        Command::Definiteness {
            file,
            transposed,
            oracle,
        } => definiteness(&file, transposed, oracle),
        Command::Decide {
            logic,
            input,
            alphabet,
            certificate,
            hom,
            oracle,
        } => decide(logic, &input, alphabet.as_deref(), certificate, hom, oracle),
        Command::Witness { file, k, hom } => witness(&file, k, hom),
        Command::Decompose {
            logic,
            file,
            max_size,
            hom,
            lines,
        } => decompose(logic, &file, max_size, hom, lines),
        Command::OracleCheck { file, k, hom } => oracle_check(&file, k, hom),
    }
}

fn read_file(path: &str) -> Result<AlgebraFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    format::parse(&text).with_context(|| format!("parsing {path}"))
}

/// A file's homomorphism, and its recognizer when the file has `accept:`.
fn load(path: &str) -> Result<(Homomorphism, Option<Recognizer>)> {
    let file = read_file(path)?;
    let hom = hom_from_file(&file).with_context(|| format!("{path}: no homomorphism"))?;
    let rec = match file.accept {
        Some(_) => Some(Recognizer::from_file(&file)?),
        None => None,
    };
    Ok((hom, rec))
}

fn formula_alphabet(phi: &forestalg::Formula, alphabet: Option<&str>) -> Result<Alphabet> {
    Ok(match alphabet {
        Some(list) => Alphabet::parse(list)?,
        None => {
            let letters = phi.letters();
            if letters.is_empty() {
                bail!("formula has no letters; pass --alphabet");
            }
            Alphabet::from_names(&letters)?
        }
    })
}

/// The homomorphism a decision is about: the syntactic one of a recognizer
/// or formula, or with `raw` the image of the file's homomorphism.
fn subject(input: &str, alphabet: Option<&str>, raw: bool) -> Result<(Homomorphism, &'static str)> {
    if Path::new(input).exists() {
        let (hom, rec) = load(input)?;
        match rec {
            Some(rec) if !raw => Ok((rec.syntactic().recognizer.hom, "syntactic")),
            _ => Ok((hom.image_restrict().0, "homomorphism")),
        }
    } else {
        let phi = parse_formula(input).with_context(|| format!("`{input}` is neither a file nor a formula"))?;
        let rec = to_recognizer(&phi, &formula_alphabet(&phi, alphabet)?)?;
        Ok((rec.syntactic().recognizer.hom, "syntactic"))
    }
}

fn names(hom: &Homomorphism, hs: &[usize]) -> Vec<String> {
    hs.iter().map(|&h| hom.target().h_name(h).to_string()).collect()
}

fn size_fields(r: &mut Report, hom: &Homomorphism, origin: &str) {
    r.field("input", origin);
    r.field("alphabet", hom.alphabet().to_string());
    r.field("horizontal", hom.target().h_len());
    r.field("vertical", hom.target().v_len());
}

fn check(path: &str) -> Result<Report> {
    let file = read_file(path)?;
    let alg = &file.algebra;
    let mut r = Report::new("check");
    r.field("horizontal", alg.h_len());
    r.field("vertical", alg.v_len());
    r.field("closed", alg.is_closed());
    let report = alg.check_axioms();
    let laws: Vec<String> = report.violations.iter().map(|v| v.law.to_string()).collect();
    for l in &laws {
        r.line(format!("violated: {l}"));
    }
    r.set("violations", laws);
    r.field("valid", report.is_valid());
    if file.letters.is_some() {
        let hom = hom_from_file(&file)?;
        r.field("onto", hom.is_onto());
    }
    if let Some(acc) = &file.accept {
        let acc: Vec<String> = acc.iter().map(|&h| alg.h_name(h).to_string()).collect();
        r.field("accept", acc.join(" "));
    }
    if !report.is_valid() {
        r.fail();
    }
    Ok(r)
}

fn eval(path: &str, forest: &str) -> Result<Report> {
    let (hom, rec) = load(path)?;
    let s = parse_forest(forest)?;
    let h = hom.eval_forest(&s)?;
    let mut r = Report::new("eval");
    r.field("forest", s.to_string());
    r.field("value", hom.target().h_name(h));
    if let Some(rec) = rec {
        let accepted = rec.accepts_value(h);
        r.field("accepted", accepted);
        if !accepted {
            r.fail();
        }
    }
    Ok(r)
}

fn models_cmd(forest: &str, formula: &str) -> Result<Report> {
    let s = parse_forest(forest)?;
    let phi = parse_formula(formula)?;
    let holds = models(&s, &phi)?;
    let mut r = Report::new("models");
    r.field("forest", s.to_string());
    r.field("formula", phi.to_string());
    r.field("holds", holds);
    if !holds {
        r.fail();
    }
    Ok(r)
}

fn write_or_print(r: &mut Report, output: Option<&str>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {path}"))?;
            r.field("written", path);
        }
        None => {
            r.line(text.trim_end());
            r.set("file", text);
        }
    }
    Ok(())
}

fn compile(formula: &str, alphabet: Option<&str>, output: Option<&str>) -> Result<Report> {
    let phi = parse_formula(formula)?;
    let rec = to_recognizer(&phi, &formula_alphabet(&phi, alphabet)?)?;
    let mut r = Report::new("compile");
    r.set("formula", phi.to_string());
    r.set("horizontal", rec.hom.target().h_len());
    let text = format::print(&rec.to_file());
    write_or_print(&mut r, output, &text)?;
    Ok(r)
}

fn syntactic(path: &str, output: Option<&str>, iso: Option<&str>) -> Result<Report> {
    let (_, rec) = load(path)?;
    let rec = rec.with_context(|| format!("{path} has no accept: section"))?;
    let syn = rec.syntactic().recognizer;
    let mut r = Report::new("syntactic");
    r.field("horizontal", syn.hom.target().h_len());
    r.field("vertical", syn.hom.target().v_len());
    if let Some(other) = iso {
        let (hom, _) = load(other)?;
        let found = isomorphism(&syn.hom, &hom.image_restrict().0);
        match &found {
            Some(map) => {
                let pairs: Vec<String> = map
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| format!("{}->{}", syn.hom.target().h_name(i), hom.target().h_name(j)))
                    .collect();
                r.field("isomorphism", pairs.join(" "));
            }
            None => {
                r.field("isomorphism", Value::Null);
                r.fail();
            }
        }
    }
    let text = format::print(&syn.to_file());
    write_or_print(&mut r, output, &text)?;
    Ok(r)
}

fn reach(path: &str, dot: bool) -> Result<Report> {
    let (hom, _) = load(path)?;
    let alg = hom.target();
    let rs = Reachability::of(alg);
    let mut r = Report::new("reach");
    if dot {
        let text = rs.to_dot(alg);
        r.line(text.trim_end());
        r.set("dot", text);
        return Ok(r);
    }
    let classes: Vec<Vec<String>> = rs.classes().iter().map(|c| names(&hom, c)).collect();
    for (i, c) in classes.iter().enumerate() {
        let mark = if i == rs.min_class() { " (minimal)" } else { "" };
        r.line(format!("class {i}: {{{}}}{mark}", c.join(", ")));
    }
    let covers: Vec<(usize, usize)> = rs.covers();
    for (lo, hi) in &covers {
        r.line(format!("cover: {hi} > {lo}"));
    }
    r.set("classes", classes);
    r.set("covers", covers.iter().map(|(lo, hi)| json!([hi, lo])).collect::<Vec<_>>());
    r.set("subminimal", rs.subminimal());
    Ok(r)
}

fn simk(k: usize, s: &str, t: &str, oracle: bool) -> Result<Report> {
    let (s, t) = (parse_forest(s)?, parse_forest(t)?);
    let equiv = simk_equiv(&s, &t, k);
    let mut r = Report::new("simk");
    r.field("k", k);
    r.field("equivalent", equiv);
    if oracle {
        let other = TsetOracle::new().equiv(&s, &t, k);
        r.field("oracle agrees", other == equiv);
        if other != equiv {
            bail!(forestalg::Error::Internal("T-set and truncation disagree".into()));
        }
    }
    if !equiv {
        r.fail();
    }
    Ok(r)
}

fn definiteness(path: &str, transposed: bool, oracle: Option<usize>) -> Result<Report> {
    let (hom, _) = subject(path, None, true)?;
    let criterion = if transposed {
        NoneCriterion::Transposed
    } else {
        NoneCriterion::RightZero
    };
    let rep = definiteness_degree(&hom, criterion, forestalg::hom::DEFAULT_CLOSURE_CAP)?;
    let mut r = Report::new("definiteness");
    r.field("guarded semigroup", rep.semigroup_size);
    match rep.degree {
        Some(d) => r.field("degree", d),
        None => {
            r.field("degree", "none");
            r.fail();
        }
    }
    if let Some(depth) = oracle {
        // k-definite per contexts iff degree <= k, for every k within the bound
        let mut agree = true;
        for k in 0..=depth {
            let by_contexts = definiteness_oracle(&hom, k, depth, 1 << 22)?;
            let by_degree = rep.degree.is_some_and(|d| d <= k);
            if by_degree && !by_contexts {
                agree = false;
            }
            if !by_degree && by_contexts && rep.degree.is_some() {
                agree = false;
            }
        }
        r.field("oracle agrees", agree);
        if !agree {
            r.fail();
        }
    }
    Ok(r)
}

fn trace_json(hom: &Homomorphism, report: &NonconfusionReport) -> Vec<Value> {
    report
        .traces
        .iter()
        .map(|t| {
            let (verdict, k) = match t.verdict {
                Verdict::Empty { k } => ("empty", k),
                Verdict::Stable { k } => ("stable", k),
            };
            json!({
                "class": names(hom, &t.members),
                "sizes": t.sizes(),
                "verdict": verdict,
                "k": k,
            })
        })
        .collect()
}

fn trace_lines(r: &mut Report, hom: &Homomorphism, report: &NonconfusionReport) {
    for t in &report.traces {
        let verdict = match t.verdict {
            Verdict::Empty { k } => format!("empty at k={k}"),
            Verdict::Stable { k } => format!("stable nonempty at k={k}"),
        };
        let sizes: Vec<String> = t.sizes().iter().map(|s| s.to_string()).collect();
        r.line(format!(
            "class {{{}}}: |B_k| = {}; {verdict}",
            names(hom, &t.members).join(", "),
            sizes.join(" ")
        ));
    }
    r.set("traces", trace_json(hom, report));
}

fn witness_fields(r: &mut Report, hom: &Homomorphism, w: &ConfusionWitness) {
    r.field("s", w.s.to_string());
    r.field("t", w.t.to_string());
    r.field("k", w.k);
    r.field(
        "values",
        format!("{} {}", hom.target().h_name(w.values.0), hom.target().h_name(w.values.1)),
    );
}

/// A context whose action is the listed vertical element `v`, when `v` is
/// the identity, an insertion or a letter.
fn context_for(hom: &Homomorphism, v: usize, wit: &std::collections::BTreeMap<usize, Forest>) -> Option<Context> {
    let alg = hom.target();
    if let Some(a) = (0..hom.alphabet().len()).find(|&a| hom.letter(a) == v) {
        return Some(Context::hole().under(hom.alphabet().label(a).clone()));
    }
    if alg.action(v).iter().enumerate().all(|(h, &x)| h == x) {
        return Some(Context::hole());
    }
    (0..alg.h_len())
        .find(|&g| alg.action(v) == alg.plus_table()[g].as_slice())
        .and_then(|g| wit.get(&g).map(|s| Context::hole().between(s.clone(), Forest::empty())))
}

fn decide(
    logic: Fragment,
    input: &str,
    alphabet: Option<&str>,
    certificate: bool,
    raw: bool,
    oracle: bool,
) -> Result<Report> {
    let (hom, origin) = subject(input, alphabet, raw)?;
    let d = decide_hom(&hom, logic)?;
    let mut r = Report::new("decide");
    r.field("logic", logic.to_string());
    size_fields(&mut r, &hom, origin);
    r.field("holds", d.holds);
    let alg = hom.target();
    match &d.certificate {
        Certificate::EfAlgebra => r.field("ef identities", true),
        Certificate::EfViolation(v) => {
            r.field("ef identities", false);
            let wit = hom.realize();
            match *v {
                EfViolation::NotCommutative { h, g } => {
                    r.field("violation", format!("{} + {} != {} + {}", alg.h_name(h), alg.h_name(g), alg.h_name(g), alg.h_name(h)));
                    if certificate {
                        r.field("h", wit[&h].to_string());
                        r.field("g", wit[&g].to_string());
                    }
                }
                EfViolation::NotAbsorbing { v, h } => {
                    let vh = alg.act(v, h);
                    r.field(
                        "violation",
                        format!(
                            "v={} h={}: vh = {} but vh+h = {}",
                            alg.v_name(v),
                            alg.h_name(h),
                            alg.h_name(vh),
                            alg.h_name(alg.plus(vh, h))
                        ),
                    );
                    if certificate {
                        let s = wit[&h].clone();
                        r.field("h", s.to_string());
                        if let Some(p) = context_for(&hom, v, &wit) {
                            let ps = p.apply(&s);
                            r.field("v", p.to_string());
                            r.field("ps", ps.to_string());
                            r.field("ps+s", ps.clone().plus(s).to_string());
                        }
                    }
                }
            }
        }
        Certificate::Definite { degree } => r.field("degree", *degree),
        Certificate::NotDefinite { e, s } => {
            r.field("degree", "none");
            if certificate {
                let show = |t: &Vec<usize>| t.iter().map(|&h| alg.h_name(h)).collect::<Vec<_>>().join(" ");
                r.field("idempotent", show(e));
                r.field("element", show(s));
            }
        }
        Certificate::Nonconfusing { parameter } => {
            r.field("nonconfusing", true);
            r.field("parameter", *parameter);
        }
        Certificate::Confused(w) => {
            r.field("nonconfusing", false);
            if certificate {
                witness_fields(&mut r, &hom, w);
            }
        }
    }
    if let Some(report) = &d.nonconfusion {
        r.field("rounds", report.rounds());
        trace_lines(&mut r, &hom, report);
        if oracle {
            let mismatches = oracle_mismatches(&hom, report, 3)?;
            r.field("oracle mismatches", mismatches);
            if mismatches > 0 {
                bail!(forestalg::Error::Internal(format!("{mismatches} oracle mismatches")));
            }
        }
    }
    if !d.holds {
        r.fail();
    }
    Ok(r)
}

fn witness(path: &str, k: Option<usize>, raw: bool) -> Result<Report> {
    let (hom, origin) = subject(path, None, raw)?;
    let report = nonconfusion(&hom)?;
    let mut r = Report::new("witness");
    size_fields(&mut r, &hom, origin);
    let Some(trace) = report.first_confused() else {
        r.field("confused", false);
        r.fail();
        return Ok(r);
    };
    let k = k.unwrap_or(match trace.verdict {
        Verdict::Stable { k } | Verdict::Empty { k } => k,
    });
    let pair = *trace.level(k).keys().next().expect("stable level is nonempty");
    let w = confusion_witness(&hom, trace, pair, k)?;
    r.field("confused", true);
    r.field("class", names(&hom, &trace.members).join(" "));
    witness_fields(&mut r, &hom, &w);
    Ok(r)
}

fn decompose(logic: Fragment, path: &str, max_size: usize, raw: bool, lines: usize) -> Result<Report> {
    let (hom, origin) = subject(path, None, raw)?;
    let cascade = match logic {
        Fragment::EF => decompose_ef(&hom, max_size)?,
        Fragment::EFEX => decompose_efex(&hom, max_size)?,
        Fragment::EX => {
            let d = definiteness_degree(&hom, NoneCriterion::RightZero, forestalg::hom::DEFAULT_CLOSURE_CAP)?;
            let k = d.degree.ok_or(forestalg::Error::NotKDefinite { k: 0 })?;
            forestalg::decompose::decompose_kdefinite(&hom, k, max_size)?
        }
    };
    let mut r = Report::new("decompose");
    r.field("logic", logic.to_string());
    size_fields(&mut r, &hom, origin);
    r.field("stages", cascade.len());
    r.field("u1 stages", cascade.count(StageKind::U1));
    r.field("one-definite stages", cascade.count(StageKind::OneDefinite));
    let verified = forestalg::decompose::verify_cascade(&hom, &cascade, max_size.max(forestalg::hom::DEFAULT_CLOSURE_CAP))?;
    if !verified {
        return Err(forestalg::Error::Internal("cascade does not factor the homomorphism".into()).into());
    }
    r.field("verified", verified);
    let listing = cascade.listing(max_size, lines)?;
    r.line(listing.trim_end());
    let stages: Vec<Value> = cascade
        .stages()
        .iter()
        .map(|s| {
            json!({
                "kind": s.kind.to_string(),
                "target": s.target.h_names(),
                "inputs": s.alphabet_size,
                "note": s.note,
            })
        })
        .collect();
    r.set("cascade", stages);
    Ok(r)
}

fn oracle_mismatches(hom: &Homomorphism, report: &NonconfusionReport, k_max: usize) -> Result<usize> {
    let mut bad = 0;
    for t in &report.traces {
        for k in 0..=k_max {
            let got: BTreeSet<_> = t.level(k).keys().copied().collect();
            if got != brute_confused_pairs(hom, t.class, k)? {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn oracle_check(path: &str, k: usize, raw: bool) -> Result<Report> {
    let (hom, origin) = subject(path, None, raw)?;
    let report = nonconfusion(&hom)?;
    let mut r = Report::new("oracle-check");
    size_fields(&mut r, &hom, origin);
    r.field("levels", k + 1);
    r.field("classes", report.traces.len());
    let bad = oracle_mismatches(&hom, &report, k)?;
    r.field("mismatches", bad);
    if bad > 0 {
        r.fail();
    }
    // the witness forests themselves are checked by independent evaluation
    if let Some(trace) = report.first_confused() {
        let pair = *trace.level(k).keys().next().expect("nonempty");
        let w = confusion_witness(&hom, trace, pair, k)?;
        let relabel = |s: &Forest| -> Result<Forest> {
            let rs = Reachability::of(hom.target());
            let (q, _) = forestalg::reach::quotient_hom(&hom, rs.class_of(pair.0), forestalg::QuotientMode::Strict)?;
            Ok(q.relabel(s)?)
        };
        let same = TsetOracle::new().equiv(&relabel(&w.s)?, &relabel(&w.t)?, k);
        r.field("witness checked", same);
        if !same {
            r.fail();
        }
    }
    Ok(r)
}
