//! Host-provided builtins reachable from guest code.

use crate::interp::error::{overflow_error, type_error, value_error, GuestError, GuestErrorKind};
use crate::interp::eval::{expect_int, EvalResult, Evaluator};
use crate::interp::value::{float_repr, Builtin, GuestList, GuestStr, Value};
use crate::runtime;

pub(crate) fn call(ev: &mut Evaluator, builtin: Builtin, args: Vec<Value>) -> EvalResult<Value> {
    match builtin {
        Builtin::Len => builtin_len(args),
        Builtin::Range => builtin_range(ev, args),
        Builtin::Print => builtin_print(ev, args),
        Builtin::Str => builtin_str(ev, args),
        Builtin::Int => builtin_int(args),
        Builtin::Float => builtin_float(args),
        Builtin::Abs => builtin_abs(args),
        Builtin::Min => builtin_min_max(args, true),
        Builtin::Max => builtin_min_max(args, false),
        Builtin::ZlibCompress => builtin_zlib_compress(ev, args),
        Builtin::ZlibDecompress => builtin_zlib_decompress(ev, args),
    }
}

fn arity<const N: usize>(name: &str, args: Vec<Value>) -> Result<[Value; N], GuestError> {
    let got = args.len();
    args.try_into()
        .map_err(|_| type_error(format!("{name}() takes {N} argument(s), got {got}")))
}

fn builtin_len(args: Vec<Value>) -> EvalResult<Value> {
    let [value] = arity::<1>("len", args)?;
    let len = match &value {
        Value::Str(s) => s.len(),
        Value::List(l) => l.len(),
        Value::Map(m) => m.len(),
        other => {
            return Err(type_error(format!(
                "object of type '{}' has no len()",
                other.type_name()
            ))
            .into())
        }
    };
    Ok(Value::Int(len as i64))
}

fn builtin_range(ev: &mut Evaluator, args: Vec<Value>) -> EvalResult<Value> {
    let (start, stop, step) = match args.len() {
        1 => (0, expect_int(&args[0], "range stop")?, 1),
        2 => (
            expect_int(&args[0], "range start")?,
            expect_int(&args[1], "range stop")?,
            1,
        ),
        3 => (
            expect_int(&args[0], "range start")?,
            expect_int(&args[1], "range stop")?,
            expect_int(&args[2], "range step")?,
        ),
        n => return Err(type_error(format!("range() takes 1 to 3 arguments, got {n}")).into()),
    };
    if step == 0 {
        return Err(value_error("range() step must not be zero").into());
    }
    let diff = stop as i128 - start as i128;
    let step_wide = step as i128;
    let count = if (step_wide > 0 && diff > 0) || (step_wide < 0 && diff < 0) {
        ((diff.abs() + step_wide.abs() - 1) / step_wide.abs()) as u64
    } else {
        0
    };
    // Probe the budget before materializing anything.
    ev.ledger.ensure_capacity(count)?;
    let mut items = Vec::with_capacity(count as usize);
    let mut current = start as i128;
    for _ in 0..count {
        items.push(Value::Int(current as i64));
        current += step_wide;
    }
    Ok(Value::List(GuestList::new(&ev.ledger, items)?))
}

fn builtin_print(ev: &mut Evaluator, args: Vec<Value>) -> EvalResult<Value> {
    let mut rendered = Vec::new();
    for (i, value) in args.iter().enumerate() {
        if i > 0 {
            rendered.push(b' ');
        }
        match value {
            // Strings print raw, without quotes.
            Value::Str(s) => rendered.extend_from_slice(s.as_bytes()),
            other => other.write_repr(&mut rendered)?,
        }
    }
    rendered.push(b'\n');
    // The captured buffer is the run's only output channel.
    ev.output.extend_from_slice(&rendered);
    Ok(Value::None)
}

fn builtin_str(ev: &mut Evaluator, args: Vec<Value>) -> EvalResult<Value> {
    let [value] = arity::<1>("str", args)?;
    if let Value::Str(_) = value {
        return Ok(value);
    }
    let mut rendered = Vec::new();
    match &value {
        // str() of a string has no quotes; of anything else it matches repr.
        Value::Float(f) => rendered.extend_from_slice(float_repr(*f).as_bytes()),
        other => other.write_repr(&mut rendered)?,
    }
    Ok(Value::Str(GuestStr::from_vec(&ev.ledger, rendered)?))
}

fn builtin_int(args: Vec<Value>) -> EvalResult<Value> {
    let [value] = arity::<1>("int", args)?;
    let result = match &value {
        Value::Int(i) => *i,
        Value::Bool(b) => i64::from(*b),
        Value::Float(f) => {
            if f.is_nan() {
                return Err(value_error("cannot convert NaN to integer").into());
            }
            if f.is_infinite() {
                return Err(overflow_error("cannot convert infinity to integer").into());
            }
            let truncated = f.trunc();
            if truncated < -(2f64.powi(63)) || truncated >= 2f64.powi(63) {
                return Err(overflow_error("float too large for 64-bit integer").into());
            }
            truncated as i64
        }
        Value::Str(s) => {
            let text = std::str::from_utf8(s.as_bytes())
                .map_err(|_| value_error("invalid literal for int()"))?
                .trim();
            parse_int_literal(text)?
        }
        other => {
            return Err(type_error(format!(
                "int() argument must be a string or a number, not '{}'",
                other.type_name()
            ))
            .into())
        }
    };
    Ok(Value::Int(result))
}

fn parse_int_literal(text: &str) -> Result<i64, GuestError> {
    if text.is_empty() {
        return Err(value_error("invalid literal for int()"));
    }
    let (negative, digits) = match text.as_bytes()[0] {
        b'+' => (false, &text[1..]),
        b'-' => (true, &text[1..]),
        _ => (false, text),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(value_error(format!("invalid literal for int(): '{text}'")));
    }
    let mut value: i64 = 0;
    for b in digits.bytes() {
        value = value
            .checked_mul(10)
            .and_then(|v| {
                let digit = (b - b'0') as i64;
                if negative {
                    v.checked_sub(digit)
                } else {
                    v.checked_add(digit)
                }
            })
            .ok_or_else(|| overflow_error("integer literal out of 64-bit range"))?;
    }
    Ok(value)
}

fn builtin_float(args: Vec<Value>) -> EvalResult<Value> {
    let [value] = arity::<1>("float", args)?;
    let result = match &value {
        Value::Float(f) => *f,
        Value::Int(i) => *i as f64,
        Value::Bool(b) => f64::from(u8::from(*b)),
        Value::Str(s) => {
            let text = std::str::from_utf8(s.as_bytes())
                .map_err(|_| value_error("invalid literal for float()"))?
                .trim();
            text.parse::<f64>()
                .map_err(|_| value_error(format!("invalid literal for float(): '{text}'")))?
        }
        other => {
            return Err(type_error(format!(
                "float() argument must be a string or a number, not '{}'",
                other.type_name()
            ))
            .into())
        }
    };
    Ok(Value::Float(result))
}

fn builtin_abs(args: Vec<Value>) -> EvalResult<Value> {
    let [value] = arity::<1>("abs", args)?;
    match value {
        Value::Int(i) => i
            .checked_abs()
            .map(Value::Int)
            .ok_or_else(|| overflow_error("abs() overflows 64-bit range").into()),
        Value::Float(f) => Ok(Value::Float(f.abs())),
        other => Err(type_error(format!(
            "bad operand type for abs(): '{}'",
            other.type_name()
        ))
        .into()),
    }
}

fn builtin_min_max(args: Vec<Value>, want_min: bool) -> EvalResult<Value> {
    let name = if want_min { "min" } else { "max" };
    let candidates: Vec<Value> = match args.len() {
        0 => return Err(type_error(format!("{name}() expects at least 1 argument")).into()),
        1 => match &args[0] {
            Value::List(list) => {
                let items = list.snapshot();
                if items.is_empty() {
                    return Err(value_error(format!("{name}() of an empty list")).into());
                }
                items
            }
            other => {
                return Err(type_error(format!(
                    "{name}() with one argument expects a list, not '{}'",
                    other.type_name()
                ))
                .into())
            }
        },
        _ => args,
    };
    let mut best = candidates[0].clone();
    for candidate in &candidates[1..] {
        let ordering = candidate.guest_cmp(&best)?;
        let replace = match ordering {
            Some(std::cmp::Ordering::Less) => want_min,
            Some(std::cmp::Ordering::Greater) => !want_min,
            _ => false,
        };
        if replace {
            best = candidate.clone();
        }
    }
    Ok(best)
}

fn expect_str(value: &Value, what: &str) -> Result<GuestStr, GuestError> {
    match value {
        Value::Str(s) => Ok(s.clone()),
        other => Err(type_error(format!(
            "{what} must be a string, not '{}'",
            other.type_name()
        ))),
    }
}

fn builtin_zlib_compress(ev: &mut Evaluator, args: Vec<Value>) -> EvalResult<Value> {
    let [value] = arity::<1>("compress", args)?;
    let input = expect_str(&value, "compress() argument")?;
    let compressed = runtime::codec_compress(input.as_bytes());
    Ok(Value::Str(GuestStr::from_vec(&ev.ledger, compressed)?))
}

fn builtin_zlib_decompress(ev: &mut Evaluator, args: Vec<Value>) -> EvalResult<Value> {
    let [value] = arity::<1>("decompress", args)?;
    let input = expect_str(&value, "decompress() argument")?;
    let decompressed = runtime::codec_decompress(input.as_bytes()).map_err(|err| {
        GuestError::new(GuestErrorKind::ValueError, format!("corrupt stream: {err}"))
    })?;
    ev.ledger.ensure_capacity(decompressed.len() as u64)?;
    Ok(Value::Str(GuestStr::from_vec(&ev.ledger, decompressed)?))
}
