//! Point literals, in the same syntax the points display with.
//!
//! Malformed text is a [`Error::Parse`]; well-formed text naming a point
//! that is not in the space fails with the space's validation error.

use std::collections::BTreeSet;

use crate::base::{BasePoint, BaseSpace};
use crate::cobweb::{CobwebPoint, CobwebSpace};
use crate::error::{Error, Result};
use crate::extremal::{EPoint, ESpike, ExtremalSpace};
use crate::hedgehog::{HedgehogPoint, HedgehogSpace};
use crate::invlimit::{LevelPoint, LimitPoint, Tower};
use crate::scalar::Scalar;
use crate::zcon::{Spike, ZPoint, ZSpace};

fn parse_err(what: &str, s: &str) -> Error {
    Error::Parse(format!("expected {what}, got {s:?}"))
}

/// Splits `(a, b, c)` into its top-level fields, respecting nested
/// parentheses and braces.
pub fn split_tuple(s: &str) -> Result<Vec<&str>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| parse_err("a parenthesised tuple", s))?;
    let mut fields = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => {
                depth -= 1;
                if depth < 0 {
                    return Err(parse_err("balanced brackets", s));
                }
            }
            ',' if depth == 0 => {
                fields.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(parse_err("balanced brackets", s));
    }
    fields.push(inner[start..].trim());
    Ok(fields)
}

fn tuple_of<'a>(s: &'a str, n: usize, what: &str) -> Result<Vec<&'a str>> {
    let fields = split_tuple(s)?;
    if fields.len() != n {
        return Err(parse_err(what, s));
    }
    Ok(fields)
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    s.trim().parse()
}

pub fn parse_base(space: &BaseSpace, s: &str) -> Result<BasePoint> {
    let s = s.trim();
    let point = match space {
        BaseSpace::UnitInterval { .. } => BasePoint::Rational(parse_scalar(s)?),
        BaseSpace::Cantor { .. } => {
            let inner = s
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| parse_err("a finite set like {1,3}", s))?;
            let mut set = BTreeSet::new();
            for item in inner.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                set.insert(item.parse::<u32>().map_err(|_| parse_err("a positive integer", item))?);
            }
            BasePoint::Set(set)
        }
        BaseSpace::Discrete { .. } => match s.strip_prefix('#') {
            Some(i) => BasePoint::Index(i.parse().map_err(|_| parse_err("a point index like #2", s))?),
            None => BasePoint::Index(
                space
                    .label_index(s)
                    .ok_or_else(|| parse_err("a point label or #index", s))?,
            ),
        },
    };
    space.contains(&point)?;
    Ok(point)
}

pub fn parse_hedgehog(space: &HedgehogSpace, s: &str) -> Result<HedgehogPoint> {
    let f = tuple_of(s, 2, "(spike, t)")?;
    let spike = f[0].parse::<u32>().map_err(|_| parse_err("a spike index", f[0]))?;
    space.point(spike, parse_scalar(f[1])?)
}

pub fn parse_cobweb(space: &CobwebSpace<u32>, s: &str) -> Result<CobwebPoint<u32>> {
    let s = s.trim();
    if !s.starts_with('(') {
        let v = s.parse::<u32>().map_err(|_| parse_err("a vortex id or (u, v, t)", s))?;
        let p = CobwebPoint::Vortex(v);
        space.validate(&p)?;
        return Ok(p);
    }
    let f = tuple_of(s, 3, "(u, v, t)")?;
    let u = f[0].parse::<u32>().map_err(|_| parse_err("a vortex id", f[0]))?;
    let v = f[1].parse::<u32>().map_err(|_| parse_err("a vortex id", f[1]))?;
    space.point(u, v, parse_scalar(f[2])?)
}

/// The middle field of a Z-point: `star` or `to <target>`.
fn parse_spike<P>(field: &str, target: impl Fn(&str) -> Result<P>) -> Result<Spike<P>> {
    if field == "star" {
        Ok(Spike::Star)
    } else if let Some(b) = field.strip_prefix("to ") {
        Ok(Spike::Toward(target(b)?))
    } else {
        Err(parse_err("`star` or `to <point>`", field))
    }
}

pub fn parse_zpoint(space: &ZSpace<BaseSpace>, s: &str) -> Result<ZPoint<BasePoint>> {
    let f = tuple_of(s, 3, "(a, star, t) or (a, to b, t)")?;
    let a = parse_base(space.base(), f[0])?;
    let spike = parse_spike(f[1], |b| parse_base(space.base(), b))?;
    space.z_make(a, spike, parse_scalar(f[2])?)
}

pub fn parse_epoint(space: &ExtremalSpace, s: &str) -> Result<EPoint> {
    let f = tuple_of(s, 3, "(a, up|down|todown b|toup b, t)")?;
    let a = parse_scalar(f[0])?;
    let spike = match f[1] {
        "up" => ESpike::Up,
        "down" => ESpike::Down,
        other => {
            if let Some(b) = other.strip_prefix("todown ") {
                ESpike::TowardDown(parse_scalar(b)?)
            } else if let Some(b) = other.strip_prefix("toup ") {
                ESpike::TowardUp(parse_scalar(b)?)
            } else {
                return Err(parse_err("up, down, todown <b> or toup <b>", other));
            }
        }
    };
    space.e_make(a, spike, parse_scalar(f[2])?)
}

/// A point of level `level` of the tower.
pub fn parse_level_point(tower: &Tower, level: usize, s: &str) -> Result<LevelPoint> {
    if level == 0 {
        return Err(parse_err("a level of at least 1", "0"));
    }
    if level == 1 {
        return Ok(LevelPoint::Base(parse_base(tower.base(), s)?));
    }
    let f = tuple_of(s, 3, "(a, star, t) or (a, to b, t)")?;
    let a = parse_level_point(tower, level - 1, f[0])?;
    let spike = parse_spike(f[1], |b| parse_level_point(tower, level - 1, b))?;
    tower.make_point(a, spike, parse_scalar(f[2])?)
}

/// `(level, representative)`.
pub fn parse_limit_point(tower: &Tower, s: &str) -> Result<LimitPoint> {
    let f = tuple_of(s, 2, "(level, point)")?;
    let level = f[0].parse::<usize>().map_err(|_| parse_err("a level number", f[0]))?;
    tower.limit_point(parse_level_point(tower, level, f[1])?)
}
