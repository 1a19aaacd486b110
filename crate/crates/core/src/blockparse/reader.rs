use super::error::DecodeError;

/// Bounds-checked little-endian cursor over a byte slice.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub(crate) fn consumed_since(&self, start: usize) -> &'a [u8] {
        &self.buf[start..self.pos]
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.remaining() < n {
            return Err(DecodeError::Truncated {
                offset: self.pos,
                needed: n - self.remaining(),
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub(crate) fn array<const N: usize>(&mut self) -> Result<[u8; N], DecodeError> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.take(N)?);
        Ok(out)
    }

    pub(crate) fn u32_le(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    pub(crate) fn i32_le(&mut self) -> Result<i32, DecodeError> {
        Ok(i32::from_le_bytes(self.array()?))
    }

    pub(crate) fn i64_le(&mut self) -> Result<i64, DecodeError> {
        Ok(i64::from_le_bytes(self.array()?))
    }

    pub(crate) fn varint(&mut self) -> Result<u64, DecodeError> {
        let (value, used) =
            parse_varint(&self.buf[self.pos..]).map_err(|e| e.rebase(self.pos))?;
        self.pos += used;
        Ok(value)
    }

    /// Reads a varint-prefixed byte string.
    pub(crate) fn var_bytes(&mut self) -> Result<&'a [u8], DecodeError> {
        let len = self.varint()?;
        let offset = self.pos;
        if len > self.remaining() as u64 {
            return Err(DecodeError::ScriptTooLong {
                offset,
                len,
                remaining: self.remaining(),
            });
        }
        self.take(len as usize)
    }
}

/// Decodes a Bitcoin CompactSize integer from the front of `bytes`.
///
/// Returns the value and the number of bytes it occupied (1, 3, 5 or 9).
pub fn parse_varint(bytes: &[u8]) -> Result<(u64, usize), DecodeError> {
    let first = *bytes.first().ok_or(DecodeError::Truncated {
        offset: 0,
        needed: 1,
    })?;
    let width = match first {
        0xFD => 2,
        0xFE => 4,
        0xFF => 8,
        n => return Ok((n as u64, 1)),
    };
    let body = bytes.get(1..1 + width).ok_or_else(|| DecodeError::Truncated {
        offset: 1,
        needed: 1 + width - bytes.len(),
    })?;
    let mut le = [0u8; 8];
    le[..width].copy_from_slice(body);
    Ok((u64::from_le_bytes(le), 1 + width))
}

/// Appends the CompactSize encoding of `value` using the shortest form.
pub fn encode_varint(value: u64, out: &mut Vec<u8>) {
    match value {
        0..=0xFC => out.push(value as u8),
        0xFD..=0xFFFF => {
            out.push(0xFD);
            out.extend_from_slice(&(value as u16).to_le_bytes());
        }
        0x1_0000..=0xFFFF_FFFF => {
            out.push(0xFE);
            out.extend_from_slice(&(value as u32).to_le_bytes());
        }
        _ => {
            out.push(0xFF);
            out.extend_from_slice(&value.to_le_bytes());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Written independently of `encode_varint`: picks the width from the
    /// value's bit length.
    fn oracle_encode(v: u64) -> Vec<u8> {
        let bits = 64 - v.leading_zeros();
        if v < 0xFD {
            vec![v as u8]
        } else if bits <= 16 {
            let mut o = vec![0xFD];
            o.push((v & 0xFF) as u8);
            o.push((v >> 8) as u8);
            o
        } else if bits <= 32 {
            let mut o = vec![0xFE];
            for i in 0..4 {
                o.push((v >> (8 * i)) as u8);
            }
            o
        } else {
            let mut o = vec![0xFF];
            for i in 0..8 {
                o.push((v >> (8 * i)) as u8);
            }
            o
        }
    }

    #[test]
    fn zero() {
        assert_eq!(parse_varint(&[0x00]).unwrap(), (0, 1));
    }

    #[test]
    fn largest_single_byte() {
        assert_eq!(oracle_encode(252), vec![0xFC]);
        assert_eq!(parse_varint(&[0xFC]).unwrap(), (252, 1));
    }

    #[test]
    fn smallest_two_byte() {
        assert_eq!(oracle_encode(253), vec![0xFD, 0xFD, 0x00]);
        assert_eq!(parse_varint(&[0xFD, 0xFD, 0x00]).unwrap(), (253, 3));
    }

    #[test]
    fn widths() {
        assert_eq!(parse_varint(&oracle_encode(0x1_0000)).unwrap(), (0x1_0000, 5));
        assert_eq!(parse_varint(&oracle_encode(u64::MAX)).unwrap(), (u64::MAX, 9));
    }

    #[test]
    fn truncated() {
        assert_eq!(
            parse_varint(&[]),
            Err(DecodeError::Truncated { offset: 0, needed: 1 })
        );
        assert_eq!(
            parse_varint(&[0xFE, 0x01]),
            Err(DecodeError::Truncated { offset: 1, needed: 3 })
        );
    }

    #[test]
    fn reader_reports_absolute_offset() {
        let buf = [0u8, 0, 0, 0xFF, 1];
        let mut r = Reader::new(&buf);
        r.take(3).unwrap();
        assert!(matches!(
            r.varint(),
            Err(DecodeError::Truncated { offset: 4, .. })
        ));
    }

    proptest! {
        #[test]
        fn matches_oracle_and_round_trips(v in any::<u64>()) {
            let mut enc = Vec::new();
            encode_varint(v, &mut enc);
            prop_assert_eq!(&enc, &oracle_encode(v));
            prop_assert_eq!(parse_varint(&enc).unwrap(), (v, enc.len()));
        }

        #[test]
        fn small_values_round_trip(v in 0u64..0x2_0000) {
            let mut enc = Vec::new();
            encode_varint(v, &mut enc);
            prop_assert_eq!(parse_varint(&enc).unwrap(), (v, enc.len()));
        }
    }
}
