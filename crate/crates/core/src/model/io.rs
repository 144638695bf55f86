//! Matrix ingestion and export.
//!
//! Two formats are supported: Matrix Market coordinate files (`real`,
//! `symmetric` or `general`) and dense whitespace-separated text. The linear
//! term comes from an optional companion file with one value per line and
//! defaults to the all-ones vector.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::QuadraticModel;
use crate::error::{Error, Result};
use crate::matrix::{symmetrize, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    DenseText,
}

impl MatrixFormat {
    /// `.mtx` / `.mm` are Matrix Market, anything else dense text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") | Some("mm") => MatrixFormat::MatrixMarket,
            _ => MatrixFormat::DenseText,
        }
    }
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix-market" | "mm" | "mtx" => Ok(MatrixFormat::MatrixMarket),
            "dense-text" | "dense" | "txt" => Ok(MatrixFormat::DenseText),
            other => Err(Error::InvalidArgument(format!(
                "unknown matrix format {other:?}"
            ))),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_value<T: Scalar>(tok: &str, line: usize) -> Result<T> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid number {tok:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite value {tok:?}"),
        });
    }
    Ok(T::lit(v))
}

/// Loads `Γ` (symmetrized) and `h` (all ones when `h_path` is `None`).
pub fn load_model<T: Scalar>(
    path: &Path,
    format: MatrixFormat,
    h_path: Option<&Path>,
) -> Result<QuadraticModel<T>> {
    let text = read(path)?;
    let raw = match format {
        MatrixFormat::MatrixMarket => parse_matrix_market(&text)?,
        MatrixFormat::DenseText => parse_dense(&text)?,
    };
    let n = raw.rows();
    let h = match h_path {
        Some(p) => parse_vector(&read(p)?)?,
        None => vec![T::one(); n],
    };
    QuadraticModel::new(symmetrize(&raw)?, h)
}

/// Whitespace-separated rows; blank lines and `#` / `%` comments skipped.
pub fn parse_dense<T: Scalar>(text: &str) -> Result<Matrix<T>> {
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = strip_comment(line);
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| parse_value(t, lineno + 1))
            .collect::<Result<Vec<T>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("row has {} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    let m = Matrix::from_rows(&rows)?;
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(m)
}

/// One value per line (any whitespace separation is accepted).
pub fn parse_vector<T: Scalar>(text: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        for tok in strip_comment(line).split_whitespace() {
            out.push(parse_value(tok, lineno + 1)?);
        }
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    let cut = line.find(['#', '%']).unwrap_or(line.len());
    line[..cut].trim()
}

/// Parses a Matrix Market `coordinate real {symmetric|general}` file.
///
/// Symmetric files must store the lower triangle only. Explicit zeros on the
/// diagonal are rejected. The result is the raw (unsymmetrized) matrix.
pub fn parse_matrix_market<T: Scalar>(text: &str) -> Result<Matrix<T>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Empty)?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::Parse {
            line: 1,
            msg: "missing %%MatrixMarket matrix header".into(),
        });
    }
    if fields[2] != "coordinate" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unsupported layout {:?}", fields[2]),
        });
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unsupported field {:?}", fields[3]),
        });
    }
    let symmetric = match fields[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unsupported symmetry {other:?}"),
            })
        }
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut m: Option<Matrix<T>> = None;
    let mut seen = 0usize;
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parse_idx = |t: &str| -> Result<usize> {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid index {t:?}"),
            })
        };
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "size line must have three integers".into(),
                    });
                }
                let (r, c, nnz) = (
                    parse_idx(toks[0])?,
                    parse_idx(toks[1])?,
                    parse_idx(toks[2])?,
                );
                if r != c {
                    return Err(Error::NotSquare { rows: r, cols: c });
                }
                if r == 0 {
                    return Err(Error::Empty);
                }
                size = Some((r, c, nnz));
                m = Some(Matrix::zeros(r, c));
            }
            Some((n, _, _)) => {
                if toks.len() != 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "entry line must be `row col value`".into(),
                    });
                }
                let (i, j) = (parse_idx(toks[0])?, parse_idx(toks[1])?);
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("index ({i}, {j}) out of range 1..={n}"),
                    });
                }
                let v: T = parse_value(toks[2], lineno)?;
                let (i, j) = (i - 1, j - 1);
                if symmetric && j > i {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "symmetric file must store the lower triangle only".into(),
                    });
                }
                if i == j && v == T::zero() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("explicit zero on the diagonal at {}", i + 1),
                    });
                }
                let mat = m.as_mut().expect("size line parsed");
                mat[(i, j)] = v;
                if symmetric {
                    mat[(j, i)] = v;
                }
                seen += 1;
            }
        }
    }
    let (_, _, nnz) = size.ok_or(Error::Parse {
        line: 1,
        msg: "missing size line".into(),
    })?;
    if seen != nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected {nnz} entries, found {seen}"),
        });
    }
    Ok(m.expect("size line parsed"))
}

/// Dense text, one row per line, shortest round-trip formatting.
pub fn write_dense<T: Scalar>(gamma: &Matrix<T>) -> String {
    let mut s = String::new();
    for i in 0..gamma.rows() {
        let row: Vec<String> = gamma.row(i).iter().map(|v| fmt_value(*v)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Matrix Market symmetric coordinate file (lower triangle, nonzeros only).
pub fn write_matrix_market<T: Scalar>(gamma: &Matrix<T>) -> String {
    let n = gamma.rows();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            let v = gamma[(i, j)];
            if v != T::zero() {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    let mut s = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(s, "{n} {n} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(s, "{i} {j} {}", fmt_value(v));
    }
    s
}

pub fn write_vector<T: Scalar>(v: &[T]) -> String {
    v.iter().map(|x| format!("{}\n", fmt_value(*x))).collect()
}

fn fmt_value<T: Scalar>(v: T) -> String {
    format!("{}", v.to_f64_lossy())
}
