//! Sequential reader for directories of raw block files.
//!
//! A file is a sequence of records `MAGIC | len: u32 LE | block[len]`,
//! possibly separated by runs of zero bytes. Only one record is held in
//! memory at a time.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use super::block::{parse_block, Block, MAGIC};
use super::error::{DecodeError, ScanError};

/// Byte accounting for a scan. With no errors,
/// `record_bytes + padding_bytes` equals the total size of the files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanStats {
    pub files: usize,
    pub blocks: usize,
    pub record_bytes: u64,
    pub padding_bytes: u64,
    /// Bytes discarded while resynchronizing after a bad record.
    pub skipped_bytes: u64,
    pub errors: usize,
}

/// Lists the regular files of `dir` in file-name order.
pub fn block_files(dir: &Path) -> Result<Vec<PathBuf>, ScanError> {
    let io_err = |source| ScanError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        if entry.file_type().map_err(io_err)?.is_file() {
            files.push(entry.path());
        }
    }
    files.sort();
    Ok(files)
}

/// Streams every block in `dir`. Errors are yielded in place and scanning
/// continues with the next record.
pub fn scan_block_files(dir: &Path) -> Result<BlockScanner, ScanError> {
    Ok(BlockScanner::new(block_files(dir)?))
}

pub struct BlockScanner {
    pending: std::vec::IntoIter<PathBuf>,
    current: Option<FileCursor>,
    stats: ScanStats,
}

struct FileCursor {
    path: PathBuf,
    reader: BufReader<File>,
    offset: u64,
    /// Bytes already read that must be re-examined while resynchronizing.
    carry: Vec<u8>,
    resync: bool,
    done: bool,
}

enum Step {
    Block(Block),
    Error(ScanError),
    EndOfFile,
}

impl BlockScanner {
    pub fn new(files: Vec<PathBuf>) -> Self {
        BlockScanner {
            pending: files.into_iter(),
            current: None,
            stats: ScanStats::default(),
        }
    }

    pub fn stats(&self) -> ScanStats {
        self.stats
    }

    fn step(cursor: &mut FileCursor, stats: &mut ScanStats) -> Step {
        match cursor.next_record(stats) {
            Ok(Some(block)) => Step::Block(block),
            Ok(None) => Step::EndOfFile,
            Err(e) => Step::Error(e),
        }
    }
}

impl Iterator for BlockScanner {
    type Item = Result<Block, ScanError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.current.is_none() {
                let path = self.pending.next()?;
                match File::open(&path) {
                    Ok(f) => {
                        self.stats.files += 1;
                        self.current = Some(FileCursor {
                            path,
                            reader: BufReader::with_capacity(1 << 20, f),
                            offset: 0,
                            carry: Vec::new(),
                            resync: false,
                            done: false,
                        });
                    }
                    Err(source) => {
                        self.stats.errors += 1;
                        return Some(Err(ScanError::Io { path, source }));
                    }
                }
            }
            let cursor = self.current.as_mut().expect("cursor present");
            match Self::step(cursor, &mut self.stats) {
                Step::Block(b) => {
                    self.stats.blocks += 1;
                    return Some(Ok(b));
                }
                Step::Error(e) => {
                    self.stats.errors += 1;
                    return Some(Err(e));
                }
                Step::EndOfFile => self.current = None,
            }
        }
    }
}

impl FileCursor {
    fn io(&self, source: std::io::Error) -> ScanError {
        io_error(&self.path, source)
    }

    /// Skips zero padding. Returns false at end of file.
    fn skip_padding(&mut self, stats: &mut ScanStats) -> Result<bool, ScanError> {
        loop {
            let buf = self
                .reader
                .fill_buf()
                .map_err(|e| io_error(&self.path, e))?;
            if buf.is_empty() {
                return Ok(false);
            }
            let zeros = buf.iter().take_while(|&&b| b == 0).count();
            let at_data = zeros < buf.len();
            self.reader.consume(zeros);
            self.offset += zeros as u64;
            stats.padding_bytes += zeros as u64;
            if at_data {
                return Ok(true);
            }
        }
    }

    /// Slides a 4-byte window forward until it equals the magic. On success
    /// the magic has been consumed. Returns false at end of file.
    fn find_magic(&mut self, stats: &mut ScanStats) -> Result<bool, ScanError> {
        let mut window = std::mem::take(&mut self.carry);
        loop {
            if window.len() == 4 {
                if window == MAGIC {
                    return Ok(true);
                }
                window.remove(0);
                stats.skipped_bytes += 1;
            }
            let buf = self
                .reader
                .fill_buf()
                .map_err(|e| io_error(&self.path, e))?;
            if buf.is_empty() {
                stats.skipped_bytes += window.len() as u64;
                return Ok(false);
            }
            window.push(buf[0]);
            self.reader.consume(1);
            self.offset += 1;
        }
    }

    fn read_up_to(&mut self, len: u64, out: &mut Vec<u8>) -> Result<usize, ScanError> {
        out.clear();
        let n = (&mut self.reader)
            .take(len)
            .read_to_end(out)
            .map_err(|e| self.io(e))?;
        self.offset += n as u64;
        Ok(n)
    }

    fn next_record(&mut self, stats: &mut ScanStats) -> Result<Option<Block>, ScanError> {
        if self.done {
            return Ok(None);
        }
        let record_offset;
        if self.resync {
            self.resync = false;
            if !self.find_magic(stats)? {
                self.done = true;
                return Ok(None);
            }
            record_offset = self.offset - 4;
        } else {
            if !self.skip_padding(stats)? {
                self.done = true;
                return Ok(None);
            }
            record_offset = self.offset;
            let mut magic = Vec::with_capacity(4);
            let n = self.read_up_to(4, &mut magic)?;
            if n < 4 || magic != MAGIC {
                let mut found = [0u8; 4];
                found[..n].copy_from_slice(&magic);
                stats.skipped_bytes += 1;
                self.carry = magic[1..].to_vec();
                self.resync = true;
                return Err(ScanError::BadMagic {
                    path: self.path.clone(),
                    offset: record_offset,
                    found,
                });
            }
        }

        let mut len_bytes = Vec::with_capacity(4);
        let n = self.read_up_to(4, &mut len_bytes)?;
        if n < 4 {
            stats.skipped_bytes += 4 + n as u64;
            self.done = true;
            return Err(ScanError::TruncatedRecord {
                path: self.path.clone(),
                offset: record_offset,
                declared: 0,
            });
        }
        let declared = u32::from_le_bytes(len_bytes.try_into().expect("4 bytes"));
        let mut payload = Vec::new();
        let n = self.read_up_to(declared as u64, &mut payload)?;
        if n < declared as usize {
            stats.skipped_bytes += 8 + n as u64;
            self.done = true;
            return Err(ScanError::TruncatedRecord {
                path: self.path.clone(),
                offset: record_offset,
                declared,
            });
        }
        stats.record_bytes += 8 + declared as u64;
        decode_record(&payload)
            .map(Some)
            .map_err(|source| ScanError::Block {
                path: self.path.clone(),
                offset: record_offset,
                source: source.rebase(8),
            })
    }
}

fn io_error(path: &Path, source: std::io::Error) -> ScanError {
    ScanError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn decode_record(buf: &[u8]) -> Result<Block, DecodeError> {
    let (block, used) = parse_block(buf)?;
    if used != buf.len() {
        return Err(DecodeError::LengthMismatch {
            declared: buf.len(),
            consumed: used,
        });
    }
    Ok(block)
}
