//! Single-frame extended XYZ.
//!
//! ```text
//! <atom count>
//! Lattice="ax ay az bx by bz cx cy cz" pbc="T T T"
//! <symbol> <x> <y> <z> [<vx> <vy> <vz>]
//! ```
//! Positions in Å, velocities in Å/fs. A lattice without `pbc` is periodic
//! on all axes; no lattice means open boundaries.

use std::path::Path;

use dyncut_core::elements;
use dyncut_core::{AtomicSystem, Cell, Vec3};

use crate::error::{CliError, CliResult};
use crate::output::fmt_real;

pub fn read_xyz(path: &Path) -> CliResult<AtomicSystem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_xyz(&text, &path.display().to_string())
}

pub fn parse_xyz(text: &str, origin: &str) -> CliResult<AtomicSystem> {
    let err = |line: usize, message: String| CliError::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let lines: Vec<&str> = text.lines().collect();
    let count_line = lines.first().ok_or_else(|| err(1, "empty file".into()))?;
    let n: usize = count_line.trim().parse().map_err(|_| {
        err(
            1,
            format!(
                "atom count `{}` is not a non-negative integer",
                count_line.trim()
            ),
        )
    })?;
    let comment = lines
        .get(1)
        .ok_or_else(|| err(2, "missing comment line".into()))?;
    let cell = parse_comment(comment).map_err(|m| err(2, m))?;

    let mut positions = Vec::with_capacity(n);
    let mut species = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    let mut columns = None;
    for i in 0..n {
        let line_no = i + 3;
        let line = lines.get(i + 2).ok_or_else(|| {
            err(
                line_no,
                format!("expected {n} atom lines, file ends after {i}"),
            )
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let expected = *columns.get_or_insert(fields.len());
        if fields.len() != expected || !(expected == 4 || expected == 7) {
            return Err(err(
                line_no,
                format!(
                    "expected `symbol x y z [vx vy vz]` ({} columns), got {}",
                    columns.unwrap_or(4),
                    fields.len()
                ),
            ));
        }
        let z = parse_species(fields[0])
            .ok_or_else(|| err(line_no, format!("unknown element `{}`", fields[0])))?;
        let reals: Vec<f64> = fields[1..]
            .iter()
            .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(|| err(line_no, "coordinates must be finite reals".into()))?;
        species.push(z);
        positions.push(Vec3::new(reals[0], reals[1], reals[2]));
        if expected == 7 {
            velocities.push(Vec3::new(reals[3], reals[4], reals[5]));
        }
    }
    if let Some(extra) = lines.iter().skip(n + 2).position(|l| !l.trim().is_empty()) {
        return Err(err(
            n + 3 + extra,
            format!("content after the {n} declared atoms"),
        ));
    }

    let system = AtomicSystem::from_species(positions, species, cell)?;
    if columns == Some(7) {
        Ok(system.with_velocities(velocities)?)
    } else {
        Ok(system)
    }
}

fn parse_species(token: &str) -> Option<u8> {
    elements::atomic_number(token).or_else(|| {
        token
            .parse::<u8>()
            .ok()
            .filter(|&z| elements::symbol(z).is_some())
    })
}

/// `key=value` pairs, where a value may be double-quoted.
fn comment_pairs(comment: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut rest = comment.trim();
    while !rest.is_empty() {
        let Some(eq) = rest.find('=') else {
            // A bare word (free-form comment) carries no key.
            break;
        };
        let key = rest[..eq].trim();
        let key = key
            .rsplit(char::is_whitespace)
            .next()
            .unwrap_or(key)
            .to_string();
        let after = rest[eq + 1..].trim_start();
        let (value, tail) = if let Some(quoted) = after.strip_prefix('"') {
            let end = quoted
                .find('"')
                .ok_or_else(|| format!("unterminated quote in value of `{key}`"))?;
            (&quoted[..end], &quoted[end + 1..])
        } else {
            let end = after.find(char::is_whitespace).unwrap_or(after.len());
            (&after[..end], &after[end..])
        };
        out.push((key, value.to_string()));
        rest = tail.trim_start();
    }
    Ok(out)
}

fn parse_comment(comment: &str) -> Result<Cell, String> {
    let mut lattice = None;
    let mut pbc = None;
    for (key, value) in comment_pairs(comment)? {
        match key.to_ascii_lowercase().as_str() {
            "lattice" => {
                let v: Vec<f64> = value
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|_| format!("malformed Lattice=\"{value}\""))?;
                if v.len() != 9 || v.iter().any(|x: &f64| !x.is_finite()) {
                    return Err(format!("Lattice needs 9 finite reals, got \"{value}\""));
                }
                lattice = Some([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]]);
            }
            "pbc" => {
                let flags: Vec<bool> = value
                    .split_whitespace()
                    .map(|t| match t {
                        "T" | "t" | "True" | "true" | "1" => Ok(true),
                        "F" | "f" | "False" | "false" | "0" => Ok(false),
                        _ => Err(format!("malformed pbc=\"{value}\"")),
                    })
                    .collect::<Result<_, _>>()?;
                if flags.len() != 3 {
                    return Err(format!("pbc needs 3 flags, got \"{value}\""));
                }
                pbc = Some([flags[0], flags[1], flags[2]]);
            }
            _ => {}
        }
    }
    match (lattice, pbc) {
        (Some(l), p) => Cell::new(l, p.unwrap_or([true; 3])).map_err(|e| e.to_string()),
        (None, Some(p)) if p.iter().any(|&x| x) => {
            Err("pbc is periodic but no Lattice is given".into())
        }
        (None, _) => Ok(Cell::open()),
    }
}

/// Serialises one frame; parsing the result reproduces the system exactly.
pub fn write_xyz(system: &AtomicSystem) -> String {
    let mut out = format!("{}\n", system.len());
    let cell = &system.cell;
    let mut header = Vec::new();
    if cell.has_volume() {
        let b = cell.basis();
        let l: Vec<String> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| fmt_real(b[(i, j)]))
            .collect();
        header.push(format!("Lattice=\"{}\"", l.join(" ")));
        let p: Vec<&str> = cell
            .periodic()
            .iter()
            .map(|&x| if x { "T" } else { "F" })
            .collect();
        header.push(format!("pbc=\"{}\"", p.join(" ")));
    }
    let props = if system.velocities.is_some() {
        "species:S:1:pos:R:3:vel:R:3"
    } else {
        "species:S:1:pos:R:3"
    };
    header.push(format!("Properties={props}"));
    out.push_str(&header.join(" "));
    out.push('\n');
    for i in 0..system.len() {
        let z = system.species[i];
        let x = &system.positions[i];
        out.push_str(&format!(
            "{} {} {} {}",
            elements::symbol(z).unwrap_or("X"),
            fmt_real(x[0]),
            fmt_real(x[1]),
            fmt_real(x[2])
        ));
        if let Some(v) = &system.velocities {
            out.push_str(&format!(
                " {} {} {}",
                fmt_real(v[i][0]),
                fmt_real(v[i][1]),
                fmt_real(v[i][2])
            ));
        }
        out.push('\n');
    }
    out
}
