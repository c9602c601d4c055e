//! Line-oriented text format for algebras and recognizers.
//!
//! ```text
//! # comment
//! H: 0 a b inf
//! plus:
//!   0   a   b   inf
//!   a   a   inf inf
//!   b   inf b   inf
//!   inf inf inf inf
//! V: 1 va vb
//! compose:          # optional; absent means V is generated by the listed elements
//!   ...
//! act:
//!   0 a b inf
//!   ...
//! accept: inf       # optional
//! letters: a=va b=vb  # optional
//! faithful: yes     # optional
//! ```
//!
//! Rows are whitespace separated element names. [`print`] produces the
//! canonical layout, and parsing canonical output gives back the same file.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::algebra::ForestAlgebra;
use crate::error::{Error, Result};

/// Everything an algebra file can contain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraFile {
    pub algebra: ForestAlgebra,
    pub accept: Option<Vec<usize>>,
    /// Letter names and their vertical elements, in file order.
    pub letters: Option<Vec<(String, usize)>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Plus,
    Compose,
    Act,
}

pub fn parse(text: &str) -> Result<AlgebraFile> {
    let mut h_names: Option<(usize, Vec<String>)> = None;
    let mut v_names: Option<(usize, Vec<String>)> = None;
    let mut tables: HashMap<&'static str, Vec<(usize, Vec<String>)>> = HashMap::new();
    let mut seen_tables: Vec<Section> = Vec::new();
    let mut accept: Option<(usize, Vec<String>)> = None;
    let mut letters: Option<(usize, Vec<String>)> = None;
    let mut faithful = false;
    let mut section: Option<Section> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            column: 1,
            message,
        };
        if let Some((key, rest)) = line.split_once(':') {
            let key = key.trim();
            let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            section = None;
            match key {
                "H" => set_once(&mut h_names, line_no, words, "H").map_err(err)?,
                "V" => set_once(&mut v_names, line_no, words, "V").map_err(err)?,
                "accept" => set_once(&mut accept, line_no, words, "accept").map_err(err)?,
                "letters" => set_once(&mut letters, line_no, words, "letters").map_err(err)?,
                "faithful" => {
                    faithful = match words.as_slice() {
                        [w] if w == "yes" => true,
                        [w] if w == "no" => false,
                        _ => return Err(err("expected `faithful: yes` or `faithful: no`".into())),
                    }
                }
                "plus" | "compose" | "act" => {
                    let s = match key {
                        "plus" => Section::Plus,
                        "compose" => Section::Compose,
                        _ => Section::Act,
                    };
                    if seen_tables.contains(&s) {
                        return Err(err(format!("duplicate `{key}` section")));
                    }
                    if !words.is_empty() {
                        return Err(err(format!("`{key}:` must be followed by rows on later lines")));
                    }
                    seen_tables.push(s);
                    section = Some(s);
                }
                other => return Err(err(format!("unknown section `{other}`"))),
            }
        } else {
            let s = section.ok_or_else(|| err("row outside of a table section".into()))?;
            let key = match s {
                Section::Plus => "plus",
                Section::Compose => "compose",
                Section::Act => "act",
            };
            let row = line.split_whitespace().map(str::to_string).collect();
            tables.entry(key).or_default().push((line_no, row));
        }
    }

    let missing = |what: &str| Error::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: format!("missing `{what}` section"),
    };
    let (_, h_names) = h_names.ok_or_else(|| missing("H"))?;
    let (_, v_names) = v_names.ok_or_else(|| missing("V"))?;
    let h_index = index_of(&h_names, "H")?;
    let v_index = index_of(&v_names, "V")?;

    let plus_rows = tables.remove("plus").ok_or_else(|| missing("plus"))?;
    let plus = resolve_rows(&plus_rows, &h_index, h_names.len(), "plus")?;
    let act_rows = tables.remove("act").ok_or_else(|| missing("act"))?;
    let act = resolve_rows(&act_rows, &h_index, v_names.len(), "act")?;
    let compose = match tables.remove("compose") {
        Some(rows) => Some(resolve_rows(&rows, &v_index, v_names.len(), "compose")?),
        None if seen_tables.contains(&Section::Compose) => Some(Vec::new()),
        None => None,
    };

    let zero = match h_index.get("0") {
        Some(&z) => z,
        None => (0..h_names.len())
            .find(|&z| (0..h_names.len()).all(|h| plus[z].get(h) == Some(&h)))
            .ok_or_else(|| Error::Structural("no horizontal identity".into()))?,
    };
    let one = match v_index.get("1") {
        Some(&o) => o,
        None => (0..v_names.len())
            .find(|&v| act[v].iter().enumerate().all(|(h, &x)| x == h))
            .ok_or_else(|| Error::Structural("no vertical identity".into()))?,
    };

    let algebra =
        ForestAlgebra::from_tables(h_names, plus, zero, v_names, compose, act, one, faithful)?;

    let accept = match accept {
        None => None,
        Some((line, words)) => Some(
            words
                .iter()
                .map(|w| {
                    h_index.get(w.as_str()).copied().ok_or_else(|| Error::Parse {
                        line,
                        column: 1,
                        message: format!("unknown horizontal element `{w}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let letters = match letters {
        None => None,
        Some((line, words)) => {
            let mut out: Vec<(String, usize)> = Vec::new();
            for w in words {
                let perr = |message: String| Error::Parse {
                    line,
                    column: 1,
                    message,
                };
                let (a, v) = w
                    .split_once('=')
                    .ok_or_else(|| perr(format!("expected letter=element, got `{w}`")))?;
                if !is_letter(a) {
                    return Err(perr(format!("`{a}` is not a letter")));
                }
                if out.iter().any(|(b, _)| b == a) {
                    return Err(perr(format!("letter `{a}` assigned twice")));
                }
                let vi = *v_index
                    .get(v)
                    .ok_or_else(|| perr(format!("unknown vertical element `{v}`")))?;
                out.push((a.to_string(), vi));
            }
            Some(out)
        }
    };
    Ok(AlgebraFile {
        algebra,
        accept,
        letters,
    })
}

/// Canonical rendering; see the module docs.
pub fn print(file: &AlgebraFile) -> String {
    let alg = &file.algebra;
    let n = alg.h_len();
    let m = alg.v_len();
    let mut out = String::new();
    let h = |i: usize| alg.h_name(i);
    let h_width = (0..n).map(|i| h(i).len()).max().unwrap_or(1);
    let v_width = (0..m).map(|i| alg.v_name(i).len()).max().unwrap_or(1);
    let row = |out: &mut String, cells: Vec<&str>, width: usize| {
        let padded: Vec<String> = cells.iter().map(|c| format!("{c:<width$}")).collect();
        let _ = writeln!(out, "  {}", padded.join(" ").trim_end());
    };

    let _ = writeln!(out, "H: {}", alg.h_names().join(" "));
    out.push_str("plus:\n");
    for x in 0..n {
        row(&mut out, (0..n).map(|y| h(alg.plus(x, y))).collect(), h_width);
    }
    let _ = writeln!(out, "V: {}", alg.v_names().join(" "));
    if let Some(c) = alg.compose_table() {
        out.push_str("compose:\n");
        for r in c {
            row(&mut out, r.iter().map(|&w| alg.v_name(w)).collect(), v_width);
        }
    }
    out.push_str("act:\n");
    for v in 0..m {
        row(&mut out, alg.action(v).iter().map(|&x| h(x)).collect(), h_width);
    }
    if let Some(acc) = &file.accept {
        let names: Vec<&str> = acc.iter().map(|&x| h(x)).collect();
        let _ = writeln!(out, "accept: {}", names.join(" "));
    }
    if let Some(letters) = &file.letters {
        let items: Vec<String> = letters
            .iter()
            .map(|(a, v)| format!("{a}={}", alg.v_name(*v)))
            .collect();
        let _ = writeln!(out, "letters: {}", items.join(" "));
    }
    if alg.is_faithful() {
        out.push_str("faithful: yes\n");
    }
    out
}

pub(crate) fn is_letter(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn set_once(
    slot: &mut Option<(usize, Vec<String>)>,
    line: usize,
    words: Vec<String>,
    what: &str,
) -> std::result::Result<(), String> {
    if slot.is_some() {
        return Err(format!("duplicate `{what}` section"));
    }
    *slot = Some((line, words));
    Ok(())
}

fn index_of(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            return Err(Error::Structural(format!("duplicate {what} element name `{n}`")));
        }
    }
    Ok(map)
}

fn resolve_rows(
    rows: &[(usize, Vec<String>)],
    index: &HashMap<String, usize>,
    expected_rows: usize,
    what: &str,
) -> Result<Vec<Vec<usize>>> {
    if rows.len() != expected_rows {
        return Err(Error::Structural(format!(
            "{what} has {} rows, expected {expected_rows}",
            rows.len()
        )));
    }
    rows.iter()
        .map(|(line, row)| {
            row.iter()
                .map(|w| {
                    index.get(w.as_str()).copied().ok_or_else(|| Error::Parse {
                        line: *line,
                        column: 1,
                        message: format!("unknown element `{w}` in {what}"),
                    })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{u1, u2};

    const SAMPLE: &str = "\
# two element semilattice
H: 0 inf
plus:
  0 inf
  inf inf
V: 1 cinf
act:
  0 inf
  inf inf
accept: inf
letters: a=cinf b=1
";

    #[test]
    fn parse_sample() {
        let file = parse(SAMPLE).unwrap();
        assert_eq!(file.algebra.h_len(), 2);
        assert!(!file.algebra.is_closed());
        assert_eq!(file.accept, Some(vec![1]));
        assert_eq!(
            file.letters,
            Some(vec![("a".to_string(), 1), ("b".to_string(), 0)])
        );
        assert!(file.algebra.check_axioms().is_valid());
    }

    #[test]
    fn canonical_round_trip() {
        for alg in [u1(), u2()] {
            let file = AlgebraFile {
                algebra: alg,
                accept: Some(vec![0]),
                letters: Some(vec![("a".into(), 0), ("b".into(), 1)]),
            };
            let text = print(&file);
            let back = parse(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(print(&back), text);
        }
        let text = print(&parse(SAMPLE).unwrap());
        assert_eq!(print(&parse(&text).unwrap()), text);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse("H: 0\nplus:\n 0\nV: 1\nact:\n 0\nbogus: x\n"),
            Err(Error::Parse { line: 7, .. })
        ));
        assert!(matches!(
            parse("H: 0 inf\nplus:\n 0 inf\n inf\nV: 1\nact:\n 0 inf\n"),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            parse("H: 0 inf\nplus:\n 0 inf\n inf inf\nV: 1\nact:\n 0 x\n"),
            Err(Error::Parse { line: 7, .. })
        ));
        assert!(parse("H: 0\nplus:\n 0\nact:\n 0\n").is_err());
        assert!(parse("H: 0\nplus:\n 0\nV: 1\nact:\n 0\nletters: a=q\n").is_err());
    }
}
