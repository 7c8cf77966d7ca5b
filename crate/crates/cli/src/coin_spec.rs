//! Coin specifications: a preset name, an inline matrix, or a JSON document.
//!
//! Inline matrices list complex entries as `[re, im]` pairs with rows
//! separated by `;`, e.g. `[[1,0],[0,0];[0,0],[1,0]]`. JSON documents hold a
//! preset string, a nested `[[[re, im], [re, im]], [[re, im], [re, im]]]`
//! matrix, or `{"default": <coin>, "sites": [{"site": k, "coin": <coin>}]}`.

use std::path::Path;

use qrw_core::coin::{presets, validate_coin, CoinField};
use qrw_core::{Mat2, C64};
use serde_json::Value as Json;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct CoinSpec {
    pub default: Mat2,
    /// Site overrides, in input order.
    pub sites: Vec<(i64, Mat2)>,
    pub label: String,
}

impl CoinSpec {
    pub fn resolve(&self) -> Result<CoinField, CliError> {
        let default = validate_coin(self.default, 0)?;
        let sites = self
            .sites
            .iter()
            .map(|&(s, m)| validate_coin(m, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoinField::new(default, sites))
    }
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn complex(v: &Json, at: &str) -> Result<C64, CliError> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(parse_err(format!("{at}: entries must be numbers"))),
        },
        _ => Err(parse_err(format!(
            "{at}: expected a [re, im] pair, got {v}"
        ))),
    }
}

fn matrix(v: &Json, at: &str) -> Result<Mat2, CliError> {
    let rows = v
        .as_array()
        .filter(|r| r.len() == 2)
        .ok_or_else(|| parse_err(format!("{at}: expected two rows")))?;
    let mut e = [C64::new(0.0, 0.0); 4];
    for (r, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .filter(|c| c.len() == 2)
            .ok_or_else(|| parse_err(format!("{at}: row {} must hold two entries", r + 1)))?;
        for (c, cell) in cells.iter().enumerate() {
            e[2 * r + c] = complex(cell, &format!("{at}: entry ({}, {})", r + 1, c + 1))?;
        }
    }
    Ok(Mat2::new(e[0], e[1], e[2], e[3]))
}

fn preset(name: &str, at: &str) -> Result<Mat2, CliError> {
    presets::by_name(name.trim()).ok_or_else(|| {
        parse_err(format!(
            "{at}: unknown preset '{name}' (expected hadamard, hmod or identity)"
        ))
    })
}

fn coin_value(v: &Json, at: &str) -> Result<Mat2, CliError> {
    match v {
        Json::String(s) => preset(s, at),
        Json::Array(_) => matrix(v, at),
        _ => Err(parse_err(format!(
            "{at}: expected a preset name or a matrix"
        ))),
    }
}

/// `[[a],[b];[c],[d]]` to the nested JSON form.
fn inline_to_json(text: &str) -> String {
    format!("[{}]", text.replace(';', "],["))
}

fn json_doc(text: &str) -> Result<Json, CliError> {
    serde_json::from_str(text)
        .map_err(|e| parse_err(format!("line {}, column {}: {e}", e.line(), e.column())))
}

/// Parses a coin specification document.
pub fn parse_coin_spec(text: &str) -> Result<CoinSpec, CliError> {
    let trimmed = text.trim();
    let label = trimmed.to_string();
    if trimmed.is_empty() {
        return Err(parse_err("empty coin specification"));
    }
    if trimmed
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Ok(CoinSpec {
            default: preset(trimmed, "coin")?,
            sites: Vec::new(),
            label,
        });
    }
    let doc = if trimmed.starts_with('[') && trimmed.contains(';') {
        json_doc(&inline_to_json(trimmed))?
    } else {
        json_doc(trimmed)?
    };
    match &doc {
        Json::Object(map) => {
            if let Some(k) = map.keys().find(|k| *k != "default" && *k != "sites") {
                return Err(parse_err(format!("unknown key '{k}' in coin document")));
            }
            let default = coin_value(
                map.get("default")
                    .ok_or_else(|| parse_err("coin document needs a 'default' coin"))?,
                "default",
            )?;
            let mut sites = Vec::new();
            if let Some(list) = map.get("sites") {
                let list = list
                    .as_array()
                    .ok_or_else(|| parse_err("'sites' must be a list"))?;
                for (i, entry) in list.iter().enumerate() {
                    let at = format!("sites[{i}]");
                    let site = entry["site"]
                        .as_i64()
                        .ok_or_else(|| parse_err(format!("{at}: missing integer 'site'")))?;
                    if sites.iter().any(|(s, _)| *s == site) {
                        return Err(parse_err(format!("{at}: site {site} listed twice")));
                    }
                    let coin = coin_value(&entry["coin"], &format!("{at}.coin"))?;
                    sites.push((site, coin));
                }
            }
            Ok(CoinSpec {
                default,
                sites,
                label,
            })
        }
        other => Ok(CoinSpec {
            default: coin_value(other, "coin")?,
            sites: Vec::new(),
            label,
        }),
    }
}

/// A `--coin` argument: a path to a coin document, or the document itself.
pub fn load_coin_arg(arg: &str) -> Result<CoinSpec, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: arg.to_string(),
            message: e.to_string(),
        })?;
        let mut spec = parse_coin_spec(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{arg}: {m}")),
            other => other,
        })?;
        spec.label = arg.to_string();
        Ok(spec)
    } else {
        parse_coin_spec(arg)
    }
}
