//! Value syntax shared by arguments and output records.

use limbs_core::angle::Angle;
use limbs_core::cubic::C;
use limbs_core::perm::Perm;

pub fn parse_angle(s: &str) -> Result<Angle, String> {
    s.parse::<Angle>().map_err(|e| e.to_string())
}

/// `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<C, String> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?} in {s:?}"));
    let z = match s.split_once(',') {
        Some((re, im)) => C::new(num(re)?, num(im)?),
        None => C::new(num(s)?, 0.0),
    };
    if z.is_finite() {
        Ok(z)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

pub fn parse_pair(s: &str) -> Result<(Angle, Angle), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two angles \"p/q,r/s\", got {s:?}"))?;
    Ok((parse_angle(a)?, parse_angle(b)?))
}

/// `WIDTHxHEIGHT`, both positive.
pub fn parse_res(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let dim = |x: &str| match x.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("bad dimension {x:?}")),
    };
    Ok((dim(w)?, dim(h)?))
}

/// Full double precision, 17 significant digits per part.
pub fn fmt_c(z: C) -> String {
    format!("{:.16e},{:.16e}", z.re, z.im)
}

/// Free text squeezed into a single field value.
pub fn word(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_graphic() && c != '=' { c } else { '_' }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Angle,
    OptAngle,
    Angles,
    Complex,
    Integer,
    Real,
    Bool,
    Perm,
    Text,
}

fn kind_of(key: &str) -> Kind {
    match key {
        "t" | "x" | "y" | "x'" | "y'" | "angle" | "partner" | "lo" | "hi" => Kind::Angle,
        "rotation" => Kind::OptAngle,
        "orbit" | "Ox" | "Oy" | "limb" | "arc" => Kind::Angles,
        "a" | "b" | "z" | "point" | "multiplier" | "first" | "second" | "tail" | "landing" | "kappa" => Kind::Complex,
        "k" | "q" | "p" | "r" | "points" | "period" | "degree" | "below_half" | "realization" | "lines" | "width"
        | "height" | "bytes" | "orbit_period" | "ray_period" | "ray_cycles" | "step" | "critical" => Kind::Integer,
        "potential" | "residual" => Kind::Real,
        "merged" | "reducible" | "third_cycle" | "yoccoz_ok" | "merge_consistent" => Kind::Bool,
        "sigma" | "tau" | "power" => Kind::Perm,
        _ => Kind::Text,
    }
}

fn check_value(kind: Kind, v: &str) -> Result<(), String> {
    let ok = match kind {
        Kind::Angle => parse_angle(v).is_ok(),
        Kind::OptAngle => v == "none" || parse_angle(v).is_ok(),
        Kind::Angles => v.split(',').all(|a| parse_angle(a).is_ok()),
        Kind::Complex => v == "none" || (v.contains(',') && parse_complex(v).is_ok()),
        Kind::Integer => v.parse::<u64>().is_ok(),
        Kind::Real => v.parse::<f64>().is_ok(),
        Kind::Bool => v == "true" || v == "false",
        Kind::Perm => Perm::parse_cycles(v).is_ok(),
        Kind::Text => true,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("value {v:?} is not of kind {kind:?}"))
    }
}

/// A record is a non-empty list of single-space separated fields. A field is
/// `key=value` with a key of letters, digits, `_` or `'`, or a bare word.
/// Values of known keys must parse as their kind.
pub fn check_record(line: &str) -> Result<(), String> {
    if line.is_empty() {
        return Err("empty record".into());
    }
    for field in line.split(' ') {
        if field.is_empty() || !field.chars().all(|c| c.is_ascii_graphic()) {
            return Err(format!("bad field {field:?}"));
        }
        if let Some((key, value)) = field.split_once('=') {
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
                return Err(format!("bad key {key:?}"));
            }
            if value.is_empty() {
                return Err(format!("empty value for {key}"));
            }
            check_value(kind_of(key), value)?;
        }
    }
    Ok(())
}
