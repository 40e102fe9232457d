//! Text formats.
//!
//! Incidence matrix (`.im`): a line `n m`, then `n` rows of `m`
//! space-separated 0/1 entries. Venn profile (`.vp`): a line `n`, then
//! `mask count` lines where `mask` is a binary string of length `n`, leftmost
//! character for `B1`. In both, `#` starts a comment.

use std::path::Path;

use splitkit::{profile_of_matrix, IncidenceMatrix, RegionSelection, VennProfile};

use crate::CliError;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, CliError> {
    tok.parse()
        .map_err(|_| CliError::Format(format!("line {line}: bad {what} {tok:?}")))
}

pub fn parse_incidence(text: &str) -> Result<IncidenceMatrix, CliError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| CliError::Format("empty incidence file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(CliError::Format(format!("line {hl}: expected \"n m\"")));
    }
    let n: usize = parse_num(toks[0], hl, "row count")?;
    let m: usize = parse_num(toks[1], hl, "column count")?;
    let mut matrix = IncidenceMatrix::zeros(n, m);
    let mut rows = 0;
    for (ln, line) in lines {
        if rows == n {
            return Err(CliError::Format(format!("line {ln}: more than {n} rows")));
        }
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != m {
            return Err(CliError::Format(format!(
                "line {ln}: {} entries, expected {m}",
                entries.len()
            )));
        }
        for (j, e) in entries.iter().enumerate() {
            match *e {
                "0" => {}
                "1" => matrix.set(rows, j, true),
                other => {
                    return Err(CliError::Format(format!("line {ln}: entry {other:?} is not 0 or 1")))
                }
            }
        }
        rows += 1;
    }
    // with no columns the rows are empty and may be omitted
    if rows != n && m != 0 {
        return Err(CliError::Format(format!("expected {n} rows, found {rows}")));
    }
    Ok(matrix)
}

pub fn parse_profile(text: &str) -> Result<VennProfile, CliError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| CliError::Format("empty profile file".into()))?;
    let n: usize = parse_num(header, hl, "set count")?;
    let mut v = VennProfile::empty(n)?;
    let mut seen = vec![false; 1 << n];
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(CliError::Format(format!("line {ln}: expected \"mask count\"")));
        }
        let (mask_str, count) = (toks[0], parse_num::<u64>(toks[1], ln, "count")?);
        if mask_str.len() != n {
            return Err(CliError::Format(format!(
                "line {ln}: mask {mask_str:?} should have {n} digits"
            )));
        }
        let mut mask = 0usize;
        for (i, b) in mask_str.bytes().enumerate() {
            match b {
                b'1' => mask |= 1 << i,
                b'0' => {}
                _ => return Err(CliError::Format(format!("line {ln}: bad mask {mask_str:?}"))),
            }
        }
        if seen[mask] {
            return Err(CliError::Format(format!("line {ln}: duplicate mask {mask_str}")));
        }
        seen[mask] = true;
        v.set_count(mask, count);
    }
    Ok(v)
}

/// Matrix rows, each optionally followed by a right-hand-side value.
pub fn format_incidence(m: &IncidenceMatrix, rhs: Option<&[u64]>) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let mut toks: Vec<String> = m.row(i).iter().map(|&b| u8::from(b).to_string()).collect();
        if let Some(r) = rhs {
            toks.push(r[i].to_string());
        }
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

/// An input collection with its element numbering.
pub enum Collection {
    Matrix(IncidenceMatrix),
    Profile(VennProfile),
}

impl Collection {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "vp") {
            Ok(Collection::Profile(parse_profile(&text)?))
        } else {
            Ok(Collection::Matrix(parse_incidence(&text)?))
        }
    }

    pub fn profile(&self) -> Result<VennProfile, CliError> {
        match self {
            Collection::Matrix(m) => Ok(profile_of_matrix(m)?),
            Collection::Profile(v) => Ok(v.clone()),
        }
    }

    /// One-based element indices of a region selection: matrix columns, or
    /// for profiles the region-grouped numbering of `VennProfile::to_matrix`.
    pub fn elements(&self, sel: &RegionSelection) -> Result<Vec<usize>, CliError> {
        let mut out = match self {
            Collection::Matrix(m) => {
                let groups = m.region_columns()?;
                let mut cols = Vec::new();
                for (mask, group) in groups.iter().enumerate() {
                    cols.extend(group.iter().take(sel.count(mask) as usize));
                }
                cols.sort_unstable();
                cols
            }
            Collection::Profile(v) => v.selection_elements(sel),
        };
        out.iter_mut().for_each(|x| *x += 1);
        Ok(out)
    }
}

pub fn witness_line(elements: &[usize]) -> String {
    let mut s = String::from("witness:");
    for e in elements {
        s.push(' ');
        s.push_str(&e.to_string());
    }
    s
}
