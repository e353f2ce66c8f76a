//! Line-oriented parameter-file format.
//!
//! ```text
//! # comment
//! [name]
//! w = 32                      # decimal sizes
//! p = 521
//! n = 17
//! top_mask = 0xff800000       # hex masks/constants, 0x required
//! term.1 = twist hi:17 lo:16 a:0x8ebfd028          # split defaults to top_mask
//! term.2 = xorshift lag:5 ops:L13,R9
//! temper.linear = R11 L7&0x9d2c5680 L15&0xefc60000 R18   # optional
//! temper.weyl = 0x9e3779b9
//! ```
//!
//! Unknown keys are rejected: a typo in a shift constant must fail loudly
//! rather than silently produce a different generator.

use crate::word::Word;
use crate::{Error, Result};

use super::{
    GeneratorParams, RecurrenceDescriptor, ShiftDir, TemperOp, TemperingDescriptor, Term,
    XorshiftOp,
};

struct Section {
    name: String,
    header_line: usize,
    // key -> (value, line)
    entries: Vec<(String, String, usize)>,
}

/// Parse a parameter file into validated rows.
pub fn parse_param_file(text: &str) -> Result<Vec<GeneratorParams>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let name = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: "unterminated section header".into(),
                })?
                .trim()
                .to_string();
            if name.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "empty section name".into(),
                });
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::DuplicateName {
                    name,
                    line: line_no,
                });
            }
            sections.push(Section {
                name,
                header_line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected key = value, got '{}'", line),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let section = sections.last_mut().ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "key outside any [section]".into(),
        })?;
        if section.entries.iter().any(|(k, _, _)| *k == key) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate key '{}'", key),
            });
        }
        section.entries.push((key, value, line_no));
    }

    sections.into_iter().map(build_section).collect()
}

fn build_section(section: Section) -> Result<GeneratorParams> {
    let mut w: Option<u32> = None;
    let mut p: Option<usize> = None;
    let mut n: Option<usize> = None;
    let mut top_mask: Option<Word> = None;
    let mut terms: Vec<(usize, String, usize)> = Vec::new();
    let mut linear: Option<(String, usize)> = None;
    let mut weyl: Option<(Word, usize)> = None;

    for (key, value, line) in &section.entries {
        match key.as_str() {
            "w" => w = Some(parse_dec(value, *line)? as u32),
            "p" => p = Some(parse_dec(value, *line)?),
            "n" => n = Some(parse_dec(value, *line)?),
            "top_mask" => top_mask = Some(parse_hex(value, *line)?),
            "temper.linear" => linear = Some((value.clone(), *line)),
            "temper.weyl" => weyl = Some((parse_hex(value, *line)?, *line)),
            _ => {
                if let Some(num) = key.strip_prefix("term.") {
                    let idx: usize = num.parse().map_err(|_| Error::Parse {
                        line: *line,
                        msg: format!("bad term index '{}'", num),
                    })?;
                    terms.push((idx, value.clone(), *line));
                } else {
                    return Err(Error::Parse {
                        line: *line,
                        msg: format!("unknown key '{}'", key),
                    });
                }
            }
        }
    }

    let missing = |what: &str| Error::Parse {
        line: section.header_line,
        msg: format!("section '{}' is missing key '{}'", section.name, what),
    };
    let w = w.ok_or_else(|| missing("w"))?;
    let p = p.ok_or_else(|| missing("p"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let top_mask = top_mask.ok_or_else(|| missing("top_mask"))?;
    let (weyl_increment, _) = weyl.ok_or_else(|| missing("temper.weyl"))?;

    terms.sort_by_key(|(idx, _, _)| *idx);
    for (want, (idx, _, line)) in terms.iter().enumerate() {
        if *idx != want + 1 {
            return Err(Error::Parse {
                line: *line,
                msg: format!(
                    "term indices must be contiguous from 1 (found term.{})",
                    idx
                ),
            });
        }
    }
    let terms = terms
        .into_iter()
        .map(|(_, value, line)| parse_term(&value, line, top_mask))
        .collect::<Result<Vec<Term>>>()?;

    let tempering_linear = match linear {
        Some((value, line)) => TemperingDescriptor::linear(parse_temper_ops(&value, line, w)?),
        None => TemperingDescriptor::none(),
    };

    let row = GeneratorParams {
        name: section.name,
        word_size: w,
        state_words: n,
        effective_bits: p,
        top_mask,
        recurrence: RecurrenceDescriptor { terms },
        tempering_nonlinear: TemperingDescriptor::weyl(),
        tempering_linear,
        weyl_increment,
    };
    row.validate()?;
    Ok(row)
}

fn parse_dec(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected decimal integer, got '{}'", s),
    })
}

fn parse_hex(s: &str, line: usize) -> Result<Word> {
    if !s.starts_with("0x") && !s.starts_with("0X") {
        return Err(Error::Parse {
            line,
            msg: format!("hex constant must carry 0x prefix: '{}'", s),
        });
    }
    Word::parse_hex(s).map_err(|msg| Error::Parse { line, msg })
}

fn parse_term(value: &str, line: usize, top_mask: Word) -> Result<Term> {
    let mut fields = value.split_whitespace();
    let kind = fields.next().unwrap_or("");
    let mut pairs = Vec::new();
    for f in fields {
        let (k, v) = f.split_once(':').ok_or_else(|| Error::Parse {
            line,
            msg: format!("term field '{}' is not key:value", f),
        })?;
        pairs.push((k.to_string(), v.to_string()));
    }
    let take = |pairs: &[(String, String)], key: &str| -> Option<String> {
        pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
    };
    let known = |pairs: &[(String, String)], allowed: &[&str]| -> Result<()> {
        for (k, _) in pairs {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown term field '{}'", k),
                });
            }
        }
        Ok(())
    };
    match kind {
        "twist" => {
            known(&pairs, &["hi", "lo", "a", "mask"])?;
            let hi = take(&pairs, "hi").ok_or_else(|| Error::Parse {
                line,
                msg: "twist needs hi:".into(),
            })?;
            let lo = take(&pairs, "lo").ok_or_else(|| Error::Parse {
                line,
                msg: "twist needs lo:".into(),
            })?;
            let a = take(&pairs, "a").ok_or_else(|| Error::Parse {
                line,
                msg: "twist needs a:".into(),
            })?;
            let split = match take(&pairs, "mask") {
                Some(m) => parse_hex(&m, line)?,
                None => top_mask,
            };
            Ok(Term::TwistedConcat {
                lag_hi: parse_dec(&hi, line)?,
                lag_lo: parse_dec(&lo, line)?,
                split_mask: split,
                twist_mask: parse_hex(&a, line)?,
            })
        }
        "xorshift" => {
            known(&pairs, &["lag", "ops"])?;
            let lag = take(&pairs, "lag").ok_or_else(|| Error::Parse {
                line,
                msg: "xorshift needs lag:".into(),
            })?;
            let ops_s = take(&pairs, "ops").ok_or_else(|| Error::Parse {
                line,
                msg: "xorshift needs ops:".into(),
            })?;
            let mut ops = Vec::new();
            for piece in ops_s.split(',') {
                ops.push(parse_xorshift_op(piece, line)?);
            }
            Ok(Term::LaggedXorshift {
                lag: parse_dec(&lag, line)?,
                ops,
            })
        }
        other => Err(Error::Parse {
            line,
            msg: format!("unknown term kind '{}'", other),
        }),
    }
}

fn parse_xorshift_op(s: &str, line: usize) -> Result<XorshiftOp> {
    let (dir, rest) = split_dir(s, line)?;
    Ok(XorshiftOp {
        dir,
        shift: parse_dec(rest, line)? as u32,
    })
}

fn split_dir(s: &str, line: usize) -> Result<(ShiftDir, &str)> {
    if let Some(rest) = s.strip_prefix('L') {
        Ok((ShiftDir::Left, rest))
    } else if let Some(rest) = s.strip_prefix('R') {
        Ok((ShiftDir::Right, rest))
    } else {
        Err(Error::Parse {
            line,
            msg: format!("shift op must start with L or R: '{}'", s),
        })
    }
}

fn parse_temper_ops(value: &str, line: usize, w: u32) -> Result<Vec<TemperOp>> {
    let mut ops = Vec::new();
    for piece in value.split_whitespace() {
        let (spec, mask) = match piece.split_once('&') {
            Some((s, m)) => (s, Some(m)),
            None => (piece, None),
        };
        let (dir, rest) = split_dir(spec, line)?;
        let and_mask = match mask {
            Some(m) => parse_hex(m, line)?,
            None => Word::mask(w),
        };
        ops.push(TemperOp {
            dir,
            shift: parse_dec(rest, line)? as u32,
            and_mask,
        });
    }
    Ok(ops)
}

/// Canonical serialization: parse(serialize(rows)) == rows, and
/// serialize(parse(f)) is the canonical form of any valid file f.
pub fn serialize_params(rows: &[GeneratorParams]) -> String {
    let mut out = String::new();
    for row in rows {
        let w = row.word_size;
        out.push_str(&format!("[{}]\n", row.name));
        out.push_str(&format!("w = {}\n", w));
        out.push_str(&format!("p = {}\n", row.effective_bits));
        out.push_str(&format!("n = {}\n", row.state_words));
        out.push_str(&format!("top_mask = 0x{}\n", row.top_mask.to_hex(w)));
        for (i, term) in row.recurrence.terms.iter().enumerate() {
            match term {
                Term::TwistedConcat {
                    lag_hi,
                    lag_lo,
                    split_mask,
                    twist_mask,
                } => {
                    let mask_part = if *split_mask == row.top_mask {
                        String::new()
                    } else {
                        format!(" mask:0x{}", split_mask.to_hex(w))
                    };
                    out.push_str(&format!(
                        "term.{} = twist hi:{} lo:{} a:0x{}{}\n",
                        i + 1,
                        lag_hi,
                        lag_lo,
                        twist_mask.to_hex(w),
                        mask_part
                    ));
                }
                Term::LaggedXorshift { lag, ops } => {
                    let chain: Vec<String> =
                        ops.iter().map(|o| fmt_dir_shift(o.dir, o.shift)).collect();
                    out.push_str(&format!(
                        "term.{} = xorshift lag:{} ops:{}\n",
                        i + 1,
                        lag,
                        chain.join(",")
                    ));
                }
            }
        }
        if row.tempering_linear.kind == super::TemperKind::Linear {
            let ops: Vec<String> = row
                .tempering_linear
                .ops
                .iter()
                .map(|o| {
                    if o.and_mask == Word::mask(w) {
                        fmt_dir_shift(o.dir, o.shift)
                    } else {
                        format!(
                            "{}&0x{}",
                            fmt_dir_shift(o.dir, o.shift),
                            o.and_mask.to_hex(w)
                        )
                    }
                })
                .collect();
            out.push_str(&format!("temper.linear = {}\n", ops.join(" ")));
        }
        out.push_str(&format!(
            "temper.weyl = 0x{}\n\n",
            row.weyl_increment.to_hex(w)
        ));
    }
    out
}

fn fmt_dir_shift(dir: ShiftDir, shift: u32) -> String {
    format!("{}{}", if dir == ShiftDir::Left { "L" } else { "R" }, shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# two toy rows
[toy8-11]
w = 8
p = 11
n = 2
top_mask = 0xe0
term.1 = twist hi:2 lo:1 a:0xb8
term.2 = xorshift lag:1 ops:L3,R2
temper.linear = R3 L2&0x6c
temper.weyl = 0x0b

[toy4-7]
w = 4
p = 7
n = 2
top_mask = 0xe
term.1 = twist hi:2 lo:1 a:0x9
term.2 = xorshift lag:1 ops:L2,R1
temper.weyl = 0xb
";

    #[test]
    fn parses_well_formed_file() {
        let rows = parse_param_file(GOOD).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].name, "toy8-11");
        assert_eq!(rows[0].word_size, 8);
        assert_eq!(rows[0].effective_bits, 11);
        assert_eq!(rows[0].tempering_linear.ops.len(), 2);
        assert_eq!(
            rows[1].tempering_linear.kind,
            super::super::TemperKind::None
        );
    }

    #[test]
    fn empty_file_gives_empty_list() {
        assert!(parse_param_file("").unwrap().is_empty());
        assert!(parse_param_file("# only comments\n\n").unwrap().is_empty());
    }

    #[test]
    fn even_weyl_increment_names_field() {
        let bad = GOOD.replace("temper.weyl = 0x0b", "temper.weyl = 0x0a");
        match parse_param_file(&bad) {
            Err(crate::Error::Invariant { field, .. }) => assert_eq!(field, "weyl_increment"),
            other => panic!("expected invariant error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let dup = format!("{}\n{}", GOOD, "[toy8-11]\nw = 8\n");
        assert!(matches!(
            parse_param_file(&dup),
            Err(crate::Error::DuplicateName { name, .. }) if name == "toy8-11"
        ));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let bad = "[a]\nw 8\n";
        match parse_param_file(bad) {
            Err(crate::Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = GOOD.replace("temper.weyl = 0x0b", "temper.weyl = 0x0b\nshift_c = 0x3");
        assert!(matches!(
            parse_param_file(&bad),
            Err(crate::Error::Parse { .. })
        ));
    }

    #[test]
    fn decimal_masks_rejected() {
        let bad = GOOD.replace("top_mask = 0xe0", "top_mask = 224");
        assert!(matches!(
            parse_param_file(&bad),
            Err(crate::Error::Parse { .. })
        ));
    }

    #[test]
    fn serialize_is_canonical_fixpoint() {
        let rows = parse_param_file(GOOD).unwrap();
        let canon = serialize_params(&rows);
        let rows2 = parse_param_file(&canon).unwrap();
        assert_eq!(rows, rows2);
        assert_eq!(serialize_params(&rows2), canon);
    }
}
