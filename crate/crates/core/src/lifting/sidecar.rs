//! Text map from lifted clauses to their provenance, one line per clause:
//!
//! ```text
//! I <block> <coord>
//! II <block> <coord> <a> <a2>
//! III <source> <cell> ... <cell>        cells as dotted coordinates, e.g. 1.2
//! STAR <source> <cell> ... : <pattern>  cells and pattern as bit strings
//! ```

use thiserror::Error;

use super::{Cell, Provenance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sidecar line {line}: {message}")]
pub struct SidecarError {
    pub line: usize,
    pub message: String,
}

fn bits(values: impl IntoIterator<Item = bool>) -> String {
    values
        .into_iter()
        .map(|b| if b { '1' } else { '0' })
        .collect()
}

pub fn write_sidecar(provenance: &[Provenance]) -> String {
    let mut out = String::new();
    for tag in provenance {
        match tag {
            Provenance::TypeI { block, coord } => out.push_str(&format!("I {block} {coord}")),
            Provenance::TypeII {
                block,
                coord,
                a,
                a2,
            } => out.push_str(&format!("II {block} {coord} {a} {a2}")),
            Provenance::TypeIII { source, cells } => {
                out.push_str(&format!("III {source}"));
                for cell in cells {
                    let coords: Vec<String> = cell.0.iter().map(u32::to_string).collect();
                    out.push(' ');
                    out.push_str(&coords.join("."));
                }
            }
            Provenance::Star {
                source,
                cells,
                pattern,
            } => {
                out.push_str(&format!("STAR {source}"));
                for cell in cells {
                    out.push(' ');
                    out.push_str(&bits(cell.0.iter().map(|&b| b == 1)));
                }
                out.push_str(" : ");
                out.push_str(&bits(pattern.iter().copied()));
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_sidecar(text: &str) -> Result<Vec<Provenance>, SidecarError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: &str| SidecarError {
            line,
            message: message.to_string(),
        };
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let num = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| err(&format!("invalid number `{s}`")))
        };
        let parse_bits = |s: &str| -> Result<Vec<u32>, SidecarError> {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(err(&format!("invalid bit string `{s}`"))),
                })
                .collect()
        };
        let tag = match fields[0] {
            "I" if fields.len() == 3 => Provenance::TypeI {
                block: num(fields[1])?,
                coord: num(fields[2])?,
            },
            "II" if fields.len() == 5 => Provenance::TypeII {
                block: num(fields[1])?,
                coord: num(fields[2])?,
                a: num(fields[3])?,
                a2: num(fields[4])?,
            },
            "III" if fields.len() >= 2 => {
                let cells = fields[2..]
                    .iter()
                    .map(|c| {
                        c.split('.')
                            .map(num)
                            .collect::<Result<Vec<_>, _>>()
                            .map(Cell)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Provenance::TypeIII {
                    source: num(fields[1])? as usize,
                    cells,
                }
            }
            "STAR" if fields.len() >= 4 && fields[fields.len() - 2] == ":" => {
                let cells = fields[2..fields.len() - 2]
                    .iter()
                    .map(|c| parse_bits(c).map(Cell))
                    .collect::<Result<Vec<_>, _>>()?;
                let pattern = parse_bits(fields[fields.len() - 1])?
                    .into_iter()
                    .map(|b| b == 1)
                    .collect();
                Provenance::Star {
                    source: num(fields[1])? as usize,
                    cells,
                    pattern,
                }
            }
            _ => return Err(err("unrecognised provenance line")),
        };
        out.push(tag);
    }
    Ok(out)
}
