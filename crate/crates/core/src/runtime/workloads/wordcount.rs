//! Word count over UTF-8 text: maximal runs of non-whitespace characters.

use super::WorkloadError;

pub fn count(input: &[u8]) -> Result<u64, WorkloadError> {
    let text = std::str::from_utf8(input)
        .map_err(|e| WorkloadError::parse("wordcount", format!("input is not UTF-8: {e}")))?;
    Ok(text.split_whitespace().count() as u64)
}

pub fn run(input: &[u8]) -> Result<Vec<u8>, WorkloadError> {
    Ok(format!("{}\n", count(input)?).into_bytes())
}
