//! Binary matrix dump: a 24-byte header followed by packed rows.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "F2MX"
//! 4       8     rows, u64 little-endian
//! 12      8     cols, u64 little-endian
//! 20      4     word size in bytes, u32 little-endian (always 8)
//! 24      ...   rows * ceil(cols/64) words, u64 little-endian, row-major
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::matrix::{packed_bytes, words_per_row, F2Matrix, MemoryBudget};

pub const MAGIC: [u8; 4] = *b"F2MX";
const WORD_BYTES: u32 = 8;

pub fn write_dump<W: Write>(m: &F2Matrix, mut w: W) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    w.write_all(&WORD_BYTES.to_le_bytes())?;
    let mut buf = Vec::with_capacity(m.data().len() * 8);
    for word in m.data() {
        buf.extend_from_slice(&word.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R, budget: MemoryBudget) -> Result<F2Matrix> {
    let mut header = [0u8; 24];
    r.read_exact(&mut header).map_err(|e| Error::MalformedDump(e.to_string()))?;
    if header[..4] != MAGIC {
        return Err(Error::MalformedDump("bad magic".into()));
    }
    let rows = u64::from_le_bytes(header[4..12].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(header[12..20].try_into().unwrap()) as usize;
    let word = u32::from_le_bytes(header[20..24].try_into().unwrap());
    if word != WORD_BYTES {
        return Err(Error::MalformedDump(format!("unsupported word size {word}")));
    }
    budget.check(packed_bytes(rows, cols))?;
    let words = rows * words_per_row(cols);
    let mut bytes = vec![0u8; words * 8];
    r.read_exact(&mut bytes).map_err(|e| Error::MalformedDump(e.to_string()))?;
    let data = bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
    let m = F2Matrix::from_packed_rows(rows, cols, data)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_roundtrip_and_layout() {
        let m = F2Matrix::from_fn(3, 70, |i, j| (i + j) % 3 == 0).unwrap();
        let mut buf = Vec::new();
        write_dump(&m, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"F2MX");
        assert_eq!(buf.len(), 24 + 3 * 2 * 8);
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 70);
        let back = read_dump(&buf[..], MemoryBudget::default()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_dump(&b"nope"[..], MemoryBudget::default()), Err(Error::MalformedDump(_))));
        let mut buf = Vec::new();
        write_dump(&F2Matrix::identity(4).unwrap(), &mut buf).unwrap();
        buf[0] = b'X';
        assert!(read_dump(&buf[..], MemoryBudget::default()).is_err());
    }
}
