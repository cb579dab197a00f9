//! The TOML cocycle description shared by every command.
//!
//! ```toml
//! [sft]
//! size = 2
//! rows = [[1, 1], [1, 0]]
//!
//! [cocycle]
//! kind = "locally-constant"
//! window = [0, 0]
//! alpha = 0.5
//!
//! [cocycle.entries]
//! 0 = "2 1 1 1"
//! 1 = "1 1 0 1"
//! ```
//!
//! A builtin needs only its name:
//!
//! ```toml
//! [builtin]
//! name = "diag-rotation"
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use toml::Spanned;

use crate::cocycle::{Builtin, CocycleKind, CocycleSpec};
use crate::error::{Error, Result};
use crate::gallery::CounterexampleParams;
use crate::matrix::Mat2;
use crate::symbolic::{parse_word, word_to_string, TransitionMatrix};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    sft: Option<Spanned<RawSft>>,
    cocycle: Option<Spanned<RawCocycle>>,
    builtin: Option<Spanned<RawBuiltin>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSft {
    size: usize,
    rows: Vec<Vec<u8>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCocycle {
    kind: Spanned<String>,
    window: Option<[i64; 2]>,
    alpha: Option<f64>,
    #[serde(default)]
    entries: BTreeMap<Spanned<String>, Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBuiltin {
    name: Spanned<String>,
    k0: Option<u64>,
    alpha: Option<f64>,
}

/// Maps a byte offset to a 1-based line number.
fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn at<T>(src: &str, span: &Spanned<T>, message: impl Into<String>) -> Error {
    Error::Parse {
        line: line_of(src, span.span().start),
        message: message.into(),
    }
}

fn parse_matrix(s: &str) -> std::result::Result<Mat2, String> {
    let v = s
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let a: [f64; 4] = v
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 4 entries \"a11 a12 a21 a22\", found {}", v.len()))?;
    let m = Mat2::from_array(a);
    m.require_sl2().map_err(|e| e.to_string())?;
    Ok(m)
}

/// Parses a spec file; errors carry the line they refer to.
pub fn parse_spec(src: &str) -> Result<CocycleSpec> {
    let raw: RawFile = toml::from_str(src).map_err(|e| Error::Parse {
        line: e.span().map_or(1, |s| line_of(src, s.start)),
        message: e.message().to_string(),
    })?;

    let sft = match &raw.sft {
        Some(s) => {
            let inner = s.get_ref();
            if inner.rows.len() != inner.size || inner.rows.iter().any(|r| r.len() != inner.size) {
                return Err(at(src, s, format!("rows must form a {0}x{0} matrix", inner.size)));
            }
            Some(TransitionMatrix::new(&inner.rows).map_err(|e| at(src, s, e.to_string()))?)
        }
        None => None,
    };

    let kind = raw.cocycle.as_ref().map(|c| c.get_ref().kind.get_ref().as_str());
    match (kind, &raw.builtin) {
        (Some("builtin") | None, Some(b)) => {
            if let Some(c) = &raw.cocycle {
                let c = c.get_ref();
                if c.window.is_some() || c.alpha.is_some() || !c.entries.is_empty() {
                    return Err(at(src, raw.cocycle.as_ref().unwrap(), "builtin cocycles take no window, alpha or entries here"));
                }
            }
            let inner = b.get_ref();
            if inner.name.get_ref() != Builtin::DIAG_ROTATION {
                return Err(at(src, &inner.name, format!("unknown builtin {:?}", inner.name.get_ref())));
            }
            let params = match inner.k0 {
                Some(k0) => CounterexampleParams::with_k0(k0).map_err(|e| at(src, b, e.to_string()))?,
                None => CounterexampleParams::determined(),
            };
            if let Some(s) = &raw.sft {
                if sft.as_ref() != Some(&TransitionMatrix::full_shift(2)) {
                    return Err(at(src, s, "the builtin lives on the full 2-shift"));
                }
            }
            let spec = CocycleSpec::diag_rotation(params);
            match inner.alpha {
                Some(a) => spec.with_alpha(a).map_err(|e| at(src, b, e.to_string())),
                None => Ok(spec),
            }
        }
        (Some("builtin"), None) => Err(at(src, raw.cocycle.as_ref().unwrap(), "kind = \"builtin\" needs a [builtin] section")),
        (Some("locally-constant"), builtin) => {
            let c = raw.cocycle.as_ref().unwrap();
            if let Some(b) = builtin {
                return Err(at(src, b, "[builtin] is only allowed with kind = \"builtin\""));
            }
            let sft = sft.ok_or_else(|| at(src, c, "locally constant cocycles need an [sft] section"))?;
            let inner = c.get_ref();
            let [lo, hi] = inner.window.unwrap_or([0, 0]);
            let alpha = inner.alpha.ok_or_else(|| at(src, c, "missing alpha"))?;
            let mut entries = Vec::with_capacity(inner.entries.len());
            for (word, value) in &inner.entries {
                let w = parse_word(word.get_ref()).map_err(|e| at(src, word, e))?;
                if let Some(&s) = w.iter().find(|&&s| s >= sft.size()) {
                    return Err(at(src, word, format!("symbol {s} out of range for alphabet of size {}", sft.size())));
                }
                let m = parse_matrix(value.get_ref()).map_err(|e| at(src, value, e))?;
                entries.push((w, m));
            }
            CocycleSpec::locally_constant(sft, (lo, hi), entries, alpha).map_err(|e| at(src, c, e.to_string()))
        }
        (Some(other), _) => Err(at(
            src,
            &raw.cocycle.as_ref().unwrap().get_ref().kind,
            format!("unknown kind {other:?}; expected \"locally-constant\" or \"builtin\""),
        )),
        (None, None) => Err(Error::Parse {
            line: 1,
            message: "expected a [cocycle] or [builtin] section".into(),
        }),
    }
}

/// Writes a float with 17 significant digits in a form TOML accepts.
fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a spec back to the file format; [`parse_spec`] recovers it exactly.
pub fn emit_spec(spec: &CocycleSpec) -> String {
    let mut out = String::new();
    match spec.kind() {
        CocycleKind::Builtin(Builtin::DiagRotation(params)) => {
            out.push_str("[builtin]\n");
            let _ = writeln!(out, "name = \"{}\"", Builtin::DIAG_ROTATION);
            let _ = writeln!(out, "k0 = {}", params.k0());
            let _ = writeln!(out, "alpha = {}", float17(spec.alpha()));
        }
        CocycleKind::LocallyConstant(lc) => {
            let q = spec.sft();
            out.push_str("[sft]\n");
            let _ = writeln!(out, "size = {}", q.size());
            let rows: Vec<String> = q
                .rows()
                .iter()
                .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
                .collect();
            let _ = writeln!(out, "rows = [{}]", rows.join(", "));
            out.push_str("\n[cocycle]\nkind = \"locally-constant\"\n");
            let (lo, hi) = lc.window();
            let _ = writeln!(out, "window = [{lo}, {hi}]");
            let _ = writeln!(out, "alpha = {}", float17(spec.alpha()));
            out.push_str("\n[cocycle.entries]\n");
            for (w, m) in spec.entries() {
                let a = m.to_array();
                let _ = writeln!(
                    out,
                    "\"{}\" = \"{} {} {} {}\"",
                    word_to_string(&w),
                    float17(a[0]),
                    float17(a[1]),
                    float17(a[2]),
                    float17(a[3])
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROTATION: &str = r#"
[sft]
size = 2
rows = [[1, 1], [1, 1]]

[cocycle]
kind = "locally-constant"
alpha = 0.5

[cocycle.entries]
0 = "0.9950041652780258 -0.09983341664682815 0.09983341664682815 0.9950041652780258"
1 = "0.9950041652780258 -0.09983341664682815 0.09983341664682815 0.9950041652780258"
"#;

    #[test]
    fn builtin_two_line_file() {
        let spec = parse_spec("[builtin]\nname = \"diag-rotation\"\n").unwrap();
        assert_eq!(spec.counterexample_params().unwrap().k0(), 13);
        assert_eq!(spec.alpha(), 0.125);
        let spec = parse_spec("[cocycle]\nkind = \"builtin\"\n[builtin]\nname = \"diag-rotation\"\nk0 = 20\n").unwrap();
        assert_eq!(spec.counterexample_params().unwrap().k0(), 20);
    }

    #[test]
    fn rotation_file_parses() {
        let spec = parse_spec(ROTATION).unwrap();
        assert!(spec.is_one_step());
        assert!(spec.bunching().bunched);
    }

    #[test]
    fn round_trip() {
        let golden = TransitionMatrix::golden_mean();
        let spec = CocycleSpec::locally_constant(
            golden.clone(),
            (-1, 1),
            golden.admissible_words(3).into_iter().enumerate().map(|(i, w)| {
                let t = 0.1 * i as f64 + 1.0 / 3.0;
                (w, Mat2::new(1.0 + t, t, 1.0, 1.0 / (1.0 + t) + t / (1.0 + t)))
            }),
            0.7,
        )
        .unwrap();
        let text = emit_spec(&spec);
        assert_eq!(parse_spec(&text).unwrap(), spec);
        assert_eq!(emit_spec(&parse_spec(&text).unwrap()), text);

        for src in [ROTATION, "[builtin]\nname = \"diag-rotation\"\n"] {
            let spec = parse_spec(src).unwrap();
            assert_eq!(parse_spec(&emit_spec(&spec)).unwrap(), spec);
        }
    }

    fn line_of_error(src: &str) -> usize {
        match parse_spec(src) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_lines() {
        let bad_det = ROTATION.replace("1 = \"0.9950041652780258 -0.09983341664682815", "1 = \"1.1 0.0 0.0 1.0\" #");
        assert_eq!(line_of_error(&bad_det), 12);
        let unknown = ROTATION.replace("alpha = 0.5", "alpha = 0.5\ncolour = 3");
        assert_eq!(line_of_error(&unknown), 9);
        assert_eq!(line_of_error("[builtin]\nname = \"nope\"\n"), 2);
        let bad_kind = ROTATION.replace("locally-constant", "tabulated");
        assert_eq!(line_of_error(&bad_kind), 7);
        let missing = ROTATION.replace("1 = \"0.99", "# 1 = \"0.99");
        assert!(matches!(parse_spec(&missing), Err(Error::Parse { .. })));
        assert_eq!(line_of_error("[sft]\nsize = 2\nrows = [[1, 1], [1]]\n"), 1);
    }
}
