//! Parser for the optional `key=value` policy file consumed by the CLI.
//!
//! Recognized keys mirror the policy fields: `profile`, `allow_host_io`,
//! `allow_env`, `allow_dynamic_modules`, `heap_budget_cells`, `hardening`.
//! Unknown keys are errors. `#` starts a comment; blank lines are ignored.

use super::{Policy, PolicyBuilder, PolicyError, Profile};
use crate::collections::HardeningMode;

pub fn parse_policy_file(text: &str) -> Result<Policy, PolicyError> {
    let mut profile: Option<Profile> = None;
    let mut settings: Vec<(usize, String, String)> = Vec::new();

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
        let (key, value) = line.split_once('=').ok_or(PolicyError::File {
            line: line_no,
            message: format!("expected key=value, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key == "profile" {
            profile = Some(match value {
                "enclave" => Profile::Enclave,
                "native" => Profile::Native,
                other => {
                    return Err(PolicyError::File {
                        line: line_no,
                        message: format!("unknown profile `{other}`"),
                    })
                }
            });
        } else {
            settings.push((line_no, key.to_string(), value.to_string()));
        }
    }

    let mut builder = Policy::builder(profile.unwrap_or(Profile::Enclave));
    for (line, key, value) in settings {
        builder = apply_setting(builder, line, &key, &value)?;
    }
    builder.build()
}

fn apply_setting(
    builder: PolicyBuilder,
    line: usize,
    key: &str,
    value: &str,
) -> Result<PolicyBuilder, PolicyError> {
    let parse_bool = |value: &str| -> Result<bool, PolicyError> {
        match value {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(PolicyError::File {
                line,
                message: format!("expected true/false, got `{other}`"),
            }),
        }
    };
    match key {
        "allow_host_io" => Ok(builder.allow_host_io(parse_bool(value)?)),
        "allow_env" => Ok(builder.allow_env(parse_bool(value)?)),
        "allow_dynamic_modules" => Ok(builder.allow_dynamic_modules(parse_bool(value)?)),
        "heap_budget_cells" => {
            let cells: u64 = value.parse().map_err(|_| PolicyError::File {
                line,
                message: format!("expected a cell count, got `{value}`"),
            })?;
            Ok(builder.heap_budget_cells(cells))
        }
        "hardening" => match value {
            "hardened" => Ok(builder.hardening(HardeningMode::Hardened)),
            "baseline" => Ok(builder.hardening(HardeningMode::Baseline)),
            other => Err(PolicyError::File {
                line,
                message: format!("unknown hardening mode `{other}`"),
            }),
        },
        other => Err(PolicyError::File {
            line,
            message: format!("unknown key `{other}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_policy() {
        let policy = parse_policy_file(
            "# measurement arm\nprofile = native\nhardening = baseline\nheap_budget_cells = 4096\n",
        )
        .unwrap();
        assert_eq!(policy.profile(), Profile::Native);
        assert_eq!(policy.hardening(), HardeningMode::Baseline);
        assert_eq!(policy.heap_budget_cells(), 4096);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let err = parse_policy_file("profile=enclave\nallow_jit=true\n").unwrap_err();
        assert!(matches!(err, PolicyError::File { line: 2, .. }));
    }

    #[test]
    fn inconsistent_file_is_rejected() {
        let err = parse_policy_file("profile=enclave\nallow_host_io=true\n").unwrap_err();
        assert!(matches!(err, PolicyError::Inconsistent(_)));
    }

    #[test]
    fn profile_applies_before_other_keys() {
        // Order in the file must not matter.
        let policy = parse_policy_file("hardening=baseline\nprofile=native\n").unwrap();
        assert_eq!(policy.hardening(), HardeningMode::Baseline);
    }
}
