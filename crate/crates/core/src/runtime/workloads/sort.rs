//! Integer sort: newline-delimited `i32` in, ascending newline-delimited out.

use super::WorkloadError;

const INSERTION_CUTOFF: usize = 16;

pub fn parse(input: &[u8]) -> Result<Vec<i32>, WorkloadError> {
    let text = std::str::from_utf8(input)
        .map_err(|_| WorkloadError::parse("sort", "input is not UTF-8"))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<i32>()
                .map_err(|e| WorkloadError::parse("sort", format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn format(values: &[i32]) -> Vec<u8> {
    let mut out = String::with_capacity(values.len() * 8);
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out.into_bytes()
}

pub fn run(input: &[u8]) -> Result<Vec<u8>, WorkloadError> {
    let mut values = parse(input)?;
    quicksort(&mut values);
    Ok(format(&values))
}

/// Quicksort with median-of-three pivots, finishing small ranges with
/// insertion sort. Recurses on the smaller side to bound stack depth.
pub fn quicksort<T: Ord + Copy>(v: &mut [T]) {
    let mut v = v;
    while v.len() > INSERTION_CUTOFF {
        let p = partition(v);
        let (left, right) = v.split_at_mut(p);
        let right = &mut right[1..];
        if left.len() < right.len() {
            quicksort(left);
            v = right;
        } else {
            quicksort(right);
            v = left;
        }
    }
    insertion_sort(v);
}

fn insertion_sort<T: Ord + Copy>(v: &mut [T]) {
    for i in 1..v.len() {
        let x = v[i];
        let mut j = i;
        while j > 0 && v[j - 1] > x {
            v[j] = v[j - 1];
            j -= 1;
        }
        v[j] = x;
    }
}

/// Hoare partition around the median of first, middle and last elements.
/// Scans stop on keys equal to the pivot, so runs of duplicates split evenly.
/// Returns the pivot's final index.
fn partition<T: Ord + Copy>(v: &mut [T]) -> usize {
    let last = v.len() - 1;
    let mid = last / 2;
    if v[mid] < v[0] {
        v.swap(mid, 0);
    }
    if v[last] < v[0] {
        v.swap(last, 0);
    }
    if v[last] < v[mid] {
        v.swap(last, mid);
    }
    // v[0] <= v[mid] <= v[last]. Park the median at last - 1; it and v[0]
    // act as sentinels for the two scans.
    v.swap(mid, last - 1);
    let pivot = v[last - 1];
    let mut i = 0;
    let mut j = last - 1;
    loop {
        i += 1;
        while v[i] < pivot {
            i += 1;
        }
        j -= 1;
        while pivot < v[j] {
            j -= 1;
        }
        if i >= j {
            break;
        }
        v.swap(i, j);
    }
    v.swap(i, last - 1);
    i
}
