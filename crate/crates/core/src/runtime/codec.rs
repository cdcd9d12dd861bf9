//! Self-contained LZ-style codec — the safe stand-in for an external
//! compression library, exposed to guest code as the `zlib_lite` module.
//!
//! Container layout (bit-exact):
//!   bytes 0..4   magic `MZL1`
//!   bytes 4..12  original length, little-endian u64
//!   then tokens: `0x00 <len:varint> <len literal bytes>`
//!              | `0x01 <dist:varint> <len:varint>` (back-reference)
//! Back-references reach at most [`WINDOW_SIZE`] bytes behind the cursor.
//! Varints are LEB128. Decoding is total: malformed input yields
//! [`CorruptStream`], never a panic.

pub const MAGIC: &[u8; 4] = b"MZL1";
pub const WINDOW_SIZE: usize = 32 * 1024;
const MIN_MATCH: usize = 4;
const TOKEN_LITERALS: u8 = 0x00;
const TOKEN_BACKREF: u8 = 0x01;

/// Hard ceiling on decoded output, to keep `decompress` total on
/// adversarial headers without handing it the whole address space.
pub const DECODER_MAX_OUTPUT: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("corrupt stream at byte {offset}: {reason}")]
pub struct CorruptStream {
    pub offset: usize,
    pub reason: String,
}

fn corrupt(offset: usize, reason: impl Into<String>) -> CorruptStream {
    CorruptStream {
        offset,
        reason: reason.into(),
    }
}

pub fn compress(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() / 2 + 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(data.len() as u64).to_le_bytes());

    // Last-seen position per 4-byte-prefix hash bucket.
    const TABLE_BITS: u32 = 15;
    let mut table = vec![usize::MAX; 1 << TABLE_BITS];
    let hash = |window: &[u8]| -> usize {
        let word = u32::from_le_bytes([window[0], window[1], window[2], window[3]]);
        (word.wrapping_mul(2654435761) >> (32 - TABLE_BITS)) as usize
    };

    let mut literal_start = 0usize;
    let mut pos = 0usize;
    while pos < data.len() {
        let candidate = if pos + MIN_MATCH <= data.len() {
            let bucket = hash(&data[pos..]);
            let found = table[bucket];
            table[bucket] = pos;
            found
        } else {
            usize::MAX
        };

        let match_len = if candidate != usize::MAX
            && candidate < pos
            && pos - candidate <= WINDOW_SIZE
            && data[candidate..candidate + MIN_MATCH] == data[pos..pos + MIN_MATCH]
        {
            let mut len = MIN_MATCH;
            while pos + len < data.len() && data[candidate + len] == data[pos + len] {
                len += 1;
            }
            len
        } else {
            0
        };

        if match_len >= MIN_MATCH {
            flush_literals(&mut out, &data[literal_start..pos]);
            out.push(TOKEN_BACKREF);
            write_varint(&mut out, (pos - candidate) as u64);
            write_varint(&mut out, match_len as u64);
            // Seed the table across the matched region so later data can
            // reference the middle of it.
            let end = pos + match_len;
            pos += 1;
            while pos < end {
                if pos + MIN_MATCH <= data.len() {
                    table[hash(&data[pos..])] = pos;
                }
                pos += 1;
            }
            literal_start = pos;
        } else {
            pos += 1;
        }
    }
    flush_literals(&mut out, &data[literal_start..]);
    out
}

fn flush_literals(out: &mut Vec<u8>, literals: &[u8]) {
    if literals.is_empty() {
        return;
    }
    out.push(TOKEN_LITERALS);
    write_varint(out, literals.len() as u64);
    out.extend_from_slice(literals);
}

pub fn decompress(data: &[u8]) -> Result<Vec<u8>, CorruptStream> {
    if data.len() < 12 {
        return Err(corrupt(0, "truncated header"));
    }
    if &data[..4] != MAGIC {
        return Err(corrupt(0, "bad magic"));
    }
    let declared = u64::from_le_bytes(data[4..12].try_into().expect("sized slice"));
    if declared > DECODER_MAX_OUTPUT {
        return Err(corrupt(4, "declared length exceeds decoder limit"));
    }
    let declared = declared as usize;

    let mut out: Vec<u8> = Vec::with_capacity(declared.min(1 << 20));
    let mut pos = 12usize;
    while pos < data.len() {
        let token = data[pos];
        let token_at = pos;
        pos += 1;
        match token {
            TOKEN_LITERALS => {
                let len = read_varint(data, &mut pos)? as usize;
                let end = pos
                    .checked_add(len)
                    .ok_or_else(|| corrupt(token_at, "literal length overflow"))?;
                if end > data.len() {
                    return Err(corrupt(token_at, "literal run past end of stream"));
                }
                if out.len() + len > declared {
                    return Err(corrupt(token_at, "output exceeds declared length"));
                }
                out.extend_from_slice(&data[pos..end]);
                pos = end;
            }
            TOKEN_BACKREF => {
                let dist = read_varint(data, &mut pos)? as usize;
                let len = read_varint(data, &mut pos)? as usize;
                if dist == 0 || dist > out.len() || dist > WINDOW_SIZE {
                    return Err(corrupt(token_at, "back-reference distance out of range"));
                }
                if len == 0 {
                    return Err(corrupt(token_at, "zero-length back-reference"));
                }
                if out.len() + len > declared {
                    return Err(corrupt(token_at, "output exceeds declared length"));
                }
                // Overlapping copies extend byte by byte (dist < len is the
                // run-length case and is legal).
                let start = out.len() - dist;
                for i in 0..len {
                    let byte = out[start + i];
                    out.push(byte);
                }
            }
            other => {
                return Err(corrupt(token_at, format!("unknown token 0x{other:02x}")));
            }
        }
    }
    if out.len() != declared {
        return Err(corrupt(
            data.len(),
            format!("declared {declared} bytes, decoded {}", out.len()),
        ));
    }
    Ok(out)
}

fn write_varint(out: &mut Vec<u8>, mut value: u64) {
    loop {
        let byte = (value & 0x7f) as u8;
        value >>= 7;
        if value == 0 {
            out.push(byte);
            break;
        }
        out.push(byte | 0x80);
    }
}

fn read_varint(data: &[u8], pos: &mut usize) -> Result<u64, CorruptStream> {
    let start = *pos;
    let mut value = 0u64;
    let mut shift = 0u32;
    loop {
        let byte = *data
            .get(*pos)
            .ok_or_else(|| corrupt(start, "truncated varint"))?;
        *pos += 1;
        if shift >= 63 && byte > 1 {
            return Err(corrupt(start, "varint overflows u64"));
        }
        value |= ((byte & 0x7f) as u64) << shift;
        if byte & 0x80 == 0 {
            return Ok(value);
        }
        shift += 7;
        if shift > 63 {
            return Err(corrupt(start, "varint too long"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_header_only() {
        let stream = compress(b"");
        assert_eq!(stream, b"MZL1\0\0\0\0\0\0\0\0");
        assert_eq!(decompress(&stream).unwrap(), b"");
    }

    #[test]
    fn repeated_bytes_shrink() {
        let data = vec![b'a'; 400];
        let stream = compress(&data);
        assert!(stream.len() < 400, "stream was {} bytes", stream.len());
        assert_eq!(decompress(&stream).unwrap(), data);
    }

    #[test]
    fn literal_only_stream_layout() {
        let stream = compress(b"abc");
        let mut expected = Vec::new();
        expected.extend_from_slice(b"MZL1");
        expected.extend_from_slice(&3u64.to_le_bytes());
        expected.extend_from_slice(&[0x00, 3, b'a', b'b', b'c']);
        assert_eq!(stream, expected);
    }

    #[test]
    fn mixed_content_round_trips() {
        let mut data = Vec::new();
        for i in 0..2000u32 {
            data.extend_from_slice(format!("record-{}|", i % 97).as_bytes());
        }
        let stream = compress(&data);
        assert!(stream.len() < data.len());
        assert_eq!(decompress(&stream).unwrap(), data);
    }

    #[test]
    fn window_limit_is_respected_by_decoder() {
        // dist > WINDOW_SIZE must be rejected even if output is long enough.
        let mut stream = Vec::new();
        stream.extend_from_slice(MAGIC);
        stream.extend_from_slice(&40_000u64.to_le_bytes());
        stream.push(TOKEN_LITERALS);
        write_varint(&mut stream, 33_000);
        stream.extend(std::iter::repeat_n(b'x', 33_000));
        stream.push(TOKEN_BACKREF);
        write_varint(&mut stream, 33_000); // farther than the window
        write_varint(&mut stream, 100);
        let err = decompress(&stream).unwrap_err();
        assert!(err.reason.contains("distance"));
    }

    #[test]
    fn malformed_streams_error_cleanly() {
        assert!(decompress(b"").is_err());
        assert!(decompress(b"MZL1").is_err());
        assert!(decompress(b"XXXX\0\0\0\0\0\0\0\0").is_err());

        // Declared length never produced.
        let mut stream = Vec::new();
        stream.extend_from_slice(MAGIC);
        stream.extend_from_slice(&5u64.to_le_bytes());
        assert!(decompress(&stream).is_err());

        // Back-reference before any output exists.
        let mut stream = Vec::new();
        stream.extend_from_slice(MAGIC);
        stream.extend_from_slice(&4u64.to_le_bytes());
        stream.extend_from_slice(&[TOKEN_BACKREF, 1, 4]);
        assert!(decompress(&stream).is_err());

        // Giant declared length is refused up front.
        let mut stream = Vec::new();
        stream.extend_from_slice(MAGIC);
        stream.extend_from_slice(&u64::MAX.to_le_bytes());
        let err = decompress(&stream).unwrap_err();
        assert!(err.reason.contains("decoder limit"));
    }

    #[test]
    fn overlapping_backref_is_run_length() {
        // "abab..." compresses to a 2-byte seed plus one overlapping match.
        let data: Vec<u8> = std::iter::repeat_n([b'a', b'b'], 300).flatten().collect();
        let stream = compress(&data);
        assert!(stream.len() < 40);
        assert_eq!(decompress(&stream).unwrap(), data);
    }
}
