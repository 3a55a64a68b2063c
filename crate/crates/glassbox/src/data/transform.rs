//! Table transforms: joining, dropping, imputing, encoding, splitting.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Column, ColumnKind, ColumnValues, EncodingMap, Schema, Table};
use crate::error::{Error, Result};

fn key_strings(t: &Table, key: &str) -> Result<Vec<String>> {
    let col = t.column(key)?;
    let values = match &col.values {
        ColumnValues::Categorical(v) => v.clone(),
        ColumnValues::Numeric(v) => v.iter().map(|x| x.to_string()).collect(),
    };
    Ok(values
        .into_iter()
        .zip(&col.missing)
        .map(|(v, &m)| if m { String::new() } else { v })
        .collect())
}

/// Left join: all left rows, right columns appended (minus the right key
/// column). Unmatched right fields are marked missing. Key values must be
/// unique in the right table.
pub fn left_join(left: &Table, right: &Table, key: &str) -> Result<Table> {
    if left.schema().index_of(key).is_none() {
        return Err(Error::Data(format!("join key `{key}` absent from left table")));
    }
    if right.schema().index_of(key).is_none() {
        return Err(Error::Data(format!("join key `{key}` absent from right table")));
    }

    let left_keys = key_strings(left, key)?;
    let right_keys = key_strings(right, key)?;

    let mut lookup: HashMap<&str, usize> = HashMap::with_capacity(right_keys.len());
    for (i, k) in right_keys.iter().enumerate() {
        if lookup.insert(k.as_str(), i).is_some() {
            return Err(Error::Data(format!(
                "duplicate key `{k}` in right table; join keys must be unique"
            )));
        }
    }

    let matches: Vec<Option<usize>> = left_keys
        .iter()
        .map(|k| lookup.get(k.as_str()).copied())
        .collect();

    let mut columns: Vec<Column> = left
        .schema()
        .columns()
        .iter()
        .map(|(n, _)| left.column(n).unwrap().clone())
        .collect();
    let mut schema_cols = left.schema().columns().to_vec();

    for (idx, (name, kind)) in right.schema().columns().iter().enumerate() {
        if name == key {
            continue;
        }
        if left.schema().index_of(name).is_some() {
            return Err(Error::Data(format!(
                "column `{name}` exists in both tables; rename before joining"
            )));
        }
        let src = right.column_at(idx);
        let n = left.n_rows();
        let mut missing = Vec::with_capacity(n);
        let values = match &src.values {
            ColumnValues::Numeric(v) => {
                let mut out = Vec::with_capacity(n);
                for m in &matches {
                    match m {
                        Some(j) if !src.missing[*j] => {
                            out.push(v[*j]);
                            missing.push(false);
                        }
                        Some(j) => {
                            out.push(v[*j]);
                            missing.push(true);
                        }
                        None => {
                            out.push(f64::NAN);
                            missing.push(true);
                        }
                    }
                }
                ColumnValues::Numeric(out)
            }
            ColumnValues::Categorical(v) => {
                let mut out = Vec::with_capacity(n);
                for m in &matches {
                    match m {
                        Some(j) if !src.missing[*j] => {
                            out.push(v[*j].clone());
                            missing.push(false);
                        }
                        Some(j) => {
                            out.push(v[*j].clone());
                            missing.push(true);
                        }
                        None => {
                            out.push(String::new());
                            missing.push(true);
                        }
                    }
                }
                ColumnValues::Categorical(out)
            }
        };
        columns.push(Column { values, missing });
        schema_cols.push((name.clone(), *kind));
    }

    Table::new(Schema::new(schema_cols)?, columns)
}

/// Drop the named columns. Row count is unchanged.
pub fn drop_columns(t: &Table, names: &[String]) -> Result<Table> {
    for name in names {
        if t.schema().index_of(name).is_none() {
            return Err(Error::Data(format!("cannot drop unknown column `{name}`")));
        }
    }
    let keep: Vec<usize> = (0..t.schema().len())
        .filter(|&i| {
            let (n, _) = &t.schema().columns()[i];
            !names.contains(n)
        })
        .collect();
    let schema_cols = keep
        .iter()
        .map(|&i| t.schema().columns()[i].clone())
        .collect();
    let columns = keep.iter().map(|&i| t.column_at(i).clone()).collect();
    Table::new(Schema::new(schema_cols)?, columns)
}

/// Median with the lower of two middles on even counts, so the imputed
/// value always exists in the data.
fn lower_median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[(values.len() - 1) / 2]
}

/// Modal category; ties broken by the lexicographically smallest category.
fn mode(counts: &BTreeMap<&str, usize>) -> String {
    let mut best: Option<(&str, usize)> = None;
    for (&cat, &n) in counts {
        match best {
            Some((_, bn)) if n <= bn => {}
            _ => best = Some((cat, n)),
        }
    }
    best.map(|(c, _)| c.to_string()).unwrap_or_default()
}

/// Fill missing values: numeric columns with the column median (lower
/// middle on even counts), categorical columns with the modal category.
/// Columns that are entirely missing get 0 / `"__ALL_MISSING__"`. Total
/// function; all missing-masks are cleared.
pub fn impute(t: &Table) -> Table {
    let columns = t
        .schema()
        .columns()
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let col = t.column_at(i);
            let n = col.len();
            match &col.values {
                ColumnValues::Numeric(v) => {
                    let mut present: Vec<f64> = v
                        .iter()
                        .zip(&col.missing)
                        .filter(|(_, &m)| !m)
                        .map(|(x, _)| *x)
                        .collect();
                    let fill = if present.is_empty() {
                        0.0
                    } else {
                        lower_median(&mut present)
                    };
                    let filled = v
                        .iter()
                        .zip(&col.missing)
                        .map(|(x, &m)| if m { fill } else { *x })
                        .collect();
                    Column::numeric(filled, vec![false; n])
                }
                ColumnValues::Categorical(v) => {
                    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                    for (x, &m) in v.iter().zip(&col.missing) {
                        if !m {
                            *counts.entry(x.as_str()).or_insert(0) += 1;
                        }
                    }
                    let fill = if counts.is_empty() {
                        "__ALL_MISSING__".to_string()
                    } else {
                        mode(&counts)
                    };
                    let filled = v
                        .iter()
                        .zip(&col.missing)
                        .map(|(x, &m)| if m { fill.clone() } else { x.clone() })
                        .collect();
                    Column::categorical(filled, vec![false; n])
                }
            }
        })
        .collect();
    Table::new(t.schema().clone(), columns).expect("impute preserves table shape")
}

/// Replace every categorical column with integer codes assigned in
/// first-appearance order. Requires imputation (no missing categoricals).
/// Numeric columns are untouched. Returns the encoded table plus the map
/// for applying to unseen data.
pub fn label_encode(t: &Table) -> Result<(Table, EncodingMap)> {
    let mut map = EncodingMap::default();
    let mut columns = Vec::with_capacity(t.schema().len());
    for (i, (name, kind)) in t.schema().columns().iter().enumerate() {
        let col = t.column_at(i);
        if *kind != ColumnKind::Categorical {
            columns.push(col.clone());
            continue;
        }
        let values = match &col.values {
            ColumnValues::Categorical(v) => v,
            ColumnValues::Numeric(_) => {
                return Err(Error::Data(format!("column `{name}` already numeric")))
            }
        };
        if col.has_missing() {
            return Err(Error::Data(format!(
                "column `{name}` has missing values; impute before encoding"
            )));
        }
        let mut categories: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut codes = Vec::with_capacity(values.len());
        for v in values {
            let code = match index.get(v) {
                Some(&c) => c,
                None => {
                    let c = categories.len();
                    categories.push(v.clone());
                    index.insert(v.clone(), c);
                    c
                }
            };
            codes.push(code as f64);
        }
        map.columns.insert(name.clone(), categories);
        columns.push(Column::numeric(codes, vec![false; values.len()]));
    }
    Ok((Table::new(t.schema().clone(), columns)?, map))
}

/// Stratified train/test split. Per-class test counts are apportioned by
/// largest remainder against `round(n_rows * test_fraction)`, so every
/// class count is within one of its ideal share. Deterministic per seed.
/// Returns `(train, test)`.
pub fn stratified_split(t: &Table, test_fraction: f64, seed: u64) -> Result<(Table, Table)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Data(format!(
            "test_fraction must be in (0,1), got {test_fraction}"
        )));
    }
    let target = t
        .schema()
        .target_column()
        .ok_or_else(|| Error::Data("stratified_split: no target column".into()))?
        .to_string();
    let col = t.column(&target)?;
    if col.has_missing() {
        return Err(Error::Data(format!("target `{target}` has missing values")));
    }

    // group row indices per class, classes in value order
    let mut classes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    match &col.values {
        ColumnValues::Numeric(v) => {
            for (i, x) in v.iter().enumerate() {
                classes.entry(format!("{x}")).or_default().push(i);
            }
        }
        ColumnValues::Categorical(v) => {
            for (i, x) in v.iter().enumerate() {
                classes.entry(x.clone()).or_default().push(i);
            }
        }
    }
    if classes.len() < 2 {
        return Err(Error::Data(format!(
            "stratified_split: target `{target}` has {} class(es); need at least 2",
            classes.len()
        )));
    }

    let total_test = (t.n_rows() as f64 * test_fraction).round() as usize;

    // largest-remainder apportionment of the test budget across classes
    let mut alloc: Vec<(String, usize, f64)> = classes
        .iter()
        .map(|(label, rows)| {
            let ideal = rows.len() as f64 * test_fraction;
            (label.clone(), ideal.floor() as usize, ideal - ideal.floor())
        })
        .collect();
    let base_sum: usize = alloc.iter().map(|(_, b, _)| *b).sum();
    let mut leftover = total_test.saturating_sub(base_sum);
    let mut order: Vec<usize> = (0..alloc.len()).collect();
    order.sort_by(|&a, &b| {
        alloc[b]
            .2
            .partial_cmp(&alloc[a].2)
            .unwrap()
            .then(alloc[a].0.cmp(&alloc[b].0))
    });
    for &i in &order {
        if leftover == 0 {
            break;
        }
        if alloc[i].1 < classes[&alloc[i].0].len() {
            alloc[i].1 += 1;
            leftover -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_idx: Vec<usize> = Vec::new();
    let mut train_idx: Vec<usize> = Vec::new();
    for (label, take) in alloc.iter().map(|(l, n, _)| (l, *n)) {
        let rows = &classes[label];
        if rows.len() >= 2 && (take == 0 || take == rows.len()) {
            return Err(Error::Data(format!(
                "stratified_split: class `{label}` would have 0 rows on one side \
                 (class size {}, test share {take})",
                rows.len()
            )));
        }
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rng);
        let (te, tr) = shuffled.split_at(take);
        test_idx.extend_from_slice(te);
        train_idx.extend_from_slice(tr);
    }
    test_idx.sort_unstable();
    train_idx.sort_unstable();

    Ok((t.select_rows(&train_idx), t.select_rows(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SchemaSpec;

    fn table(
        cols: Vec<(&str, ColumnKind, ColumnValues, Vec<bool>)>,
    ) -> Table {
        let schema = Schema::new(
            cols.iter()
                .map(|(n, k, _, _)| (n.to_string(), *k))
                .collect(),
        )
        .unwrap();
        let columns = cols
            .into_iter()
            .map(|(_, _, v, m)| Column { values: v, missing: m })
            .collect();
        Table::new(schema, columns).unwrap()
    }

    fn num(v: Vec<f64>) -> ColumnValues {
        ColumnValues::Numeric(v)
    }

    fn cat(v: Vec<&str>) -> ColumnValues {
        ColumnValues::Categorical(v.into_iter().map(String::from).collect())
    }

    fn left_right() -> (Table, Table) {
        let left = table(vec![
            ("id", ColumnKind::Key, cat(vec!["1", "2", "3"]), vec![false; 3]),
            ("x", ColumnKind::Numeric, num(vec![10.0, 20.0, 30.0]), vec![false; 3]),
        ]);
        let right = table(vec![
            ("id", ColumnKind::Key, cat(vec!["3", "1"]), vec![false; 2]),
            ("z", ColumnKind::Numeric, num(vec![300.0, 100.0]), vec![false; 2]),
        ]);
        (left, right)
    }

    #[test]
    fn left_join_keeps_all_left_rows() {
        let (left, right) = left_right();
        let joined = left_join(&left, &right, "id").unwrap();
        assert_eq!(joined.n_rows(), 3);
        let z = joined.column("z").unwrap();
        assert_eq!(z.missing, vec![false, true, false]);
        match &z.values {
            ColumnValues::Numeric(v) => {
                assert_eq!(v[0], 100.0);
                assert_eq!(v[2], 300.0);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn left_join_empty_right_gives_all_missing() {
        let (left, _) = left_right();
        let right = table(vec![
            ("id", ColumnKind::Key, cat(vec![]), vec![]),
            ("z", ColumnKind::Numeric, num(vec![]), vec![]),
        ]);
        let joined = left_join(&left, &right, "id").unwrap();
        assert_eq!(joined.n_rows(), 3);
        assert_eq!(joined.column("z").unwrap().missing, vec![true; 3]);
        // left unchanged
        assert_eq!(joined.column("x").unwrap(), left.column("x").unwrap());
    }

    #[test]
    fn left_join_self_matches_every_field() {
        let left = table(vec![
            ("id", ColumnKind::Key, cat(vec!["1", "2"]), vec![false; 2]),
            ("x", ColumnKind::Numeric, num(vec![1.5, 2.5]), vec![false; 2]),
        ]);
        let renamed = table(vec![
            ("id", ColumnKind::Key, cat(vec!["1", "2"]), vec![false; 2]),
            ("x2", ColumnKind::Numeric, num(vec![1.5, 2.5]), vec![false; 2]),
        ]);
        let joined = left_join(&left, &renamed, "id").unwrap();
        assert_eq!(
            joined.column("x").unwrap().values,
            joined.column("x2").unwrap().values
        );
    }

    #[test]
    fn left_join_rejects_duplicate_right_keys() {
        let (left, _) = left_right();
        let right = table(vec![
            ("id", ColumnKind::Key, cat(vec!["1", "1"]), vec![false; 2]),
            ("z", ColumnKind::Numeric, num(vec![1.0, 2.0]), vec![false; 2]),
        ]);
        assert!(left_join(&left, &right, "id").is_err());
    }

    #[test]
    fn drop_columns_removes_key() {
        let (left, right) = left_right();
        let joined = left_join(&left, &right, "id").unwrap();
        let dropped = drop_columns(&joined, &["id".to_string()]).unwrap();
        assert!(dropped
            .schema()
            .columns()
            .iter()
            .all(|(_, k)| *k != ColumnKind::Key));
        assert_eq!(dropped.n_rows(), 3);
        // empty drop list is the identity
        let same = drop_columns(&joined, &[]).unwrap();
        assert_eq!(&same, &joined);
        // unknown name is an error
        assert!(drop_columns(&joined, &["nope".to_string()]).is_err());
    }

    #[test]
    fn impute_numeric_uses_lower_median() {
        // two present values {1,3}: lower middle is 1
        let t = table(vec![(
            "x",
            ColumnKind::Numeric,
            num(vec![1.0, f64::NAN, 3.0]),
            vec![false, true, false],
        )]);
        let filled = impute(&t);
        match &filled.column("x").unwrap().values {
            ColumnValues::Numeric(v) => assert_eq!(v, &vec![1.0, 1.0, 3.0]),
            _ => panic!(),
        }
        // odd count: the true middle
        let t = table(vec![(
            "x",
            ColumnKind::Numeric,
            num(vec![5.0, f64::NAN, 1.0, 3.0]),
            vec![false, true, false, false],
        )]);
        let filled = impute(&t);
        match &filled.column("x").unwrap().values {
            ColumnValues::Numeric(v) => assert_eq!(v[1], 3.0),
            _ => panic!(),
        }
    }

    #[test]
    fn impute_categorical_uses_mode_with_lexicographic_ties() {
        let t = table(vec![(
            "c",
            ColumnKind::Categorical,
            cat(vec!["a", "a", "", "b"]),
            vec![false, false, true, false],
        )]);
        let filled = impute(&t);
        match &filled.column("c").unwrap().values {
            ColumnValues::Categorical(v) => assert_eq!(v[2], "a"),
            _ => panic!(),
        }
        // tie between "a" and "b": lexicographically smallest wins
        let t = table(vec![(
            "c",
            ColumnKind::Categorical,
            cat(vec!["b", "a", ""]),
            vec![false, false, true],
        )]);
        let filled = impute(&t);
        match &filled.column("c").unwrap().values {
            ColumnValues::Categorical(v) => assert_eq!(v[2], "a"),
            _ => panic!(),
        }
    }

    #[test]
    fn impute_singleton_and_all_missing() {
        let t = table(vec![
            (
                "x",
                ColumnKind::Numeric,
                num(vec![5.0, f64::NAN, f64::NAN]),
                vec![false, true, true],
            ),
            (
                "z",
                ColumnKind::Numeric,
                num(vec![f64::NAN; 3]),
                vec![true; 3],
            ),
            ("c", ColumnKind::Categorical, cat(vec!["", "", ""]), vec![true; 3]),
        ]);
        let filled = impute(&t);
        match &filled.column("x").unwrap().values {
            ColumnValues::Numeric(v) => assert_eq!(v, &vec![5.0, 5.0, 5.0]),
            _ => panic!(),
        }
        match &filled.column("z").unwrap().values {
            ColumnValues::Numeric(v) => assert_eq!(v, &vec![0.0, 0.0, 0.0]),
            _ => panic!(),
        }
        match &filled.column("c").unwrap().values {
            ColumnValues::Categorical(v) => assert_eq!(v[0], "__ALL_MISSING__"),
            _ => panic!(),
        }
    }

    #[test]
    fn impute_is_idempotent() {
        let t = table(vec![
            (
                "x",
                ColumnKind::Numeric,
                num(vec![1.0, f64::NAN, 3.0, 9.0]),
                vec![false, true, false, false],
            ),
            (
                "c",
                ColumnKind::Categorical,
                cat(vec!["a", "", "b", "a"]),
                vec![false, true, false, false],
            ),
        ]);
        let once = impute(&t);
        let twice = impute(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn label_encode_first_appearance_order() {
        let t = table(vec![
            (
                "c",
                ColumnKind::Categorical,
                cat(vec!["b", "a", "b"]),
                vec![false; 3],
            ),
            ("x", ColumnKind::Numeric, num(vec![0.25, 0.5, 0.75]), vec![false; 3]),
        ]);
        let (enc, map) = label_encode(&t).unwrap();
        match &enc.column("c").unwrap().values {
            ColumnValues::Numeric(v) => assert_eq!(v, &vec![0.0, 1.0, 0.0]),
            _ => panic!(),
        }
        assert_eq!(map.columns["c"], vec!["b".to_string(), "a".to_string()]);
        // numeric untouched bit-for-bit
        assert_eq!(enc.column("x").unwrap(), t.column("x").unwrap());
        // unseen category gets the reserved code
        assert_eq!(map.code_for("c", "zzz"), Some(2));
    }

    #[test]
    fn label_encode_round_trips_seen_values() {
        let t = table(vec![(
            "c",
            ColumnKind::Categorical,
            cat(vec!["x", "y", "x", "z", "y"]),
            vec![false; 5],
        )]);
        let (enc, map) = label_encode(&t).unwrap();
        let codes = match &enc.column("c").unwrap().values {
            ColumnValues::Numeric(v) => v.clone(),
            _ => panic!(),
        };
        let orig = match &t.column("c").unwrap().values {
            ColumnValues::Categorical(v) => v.clone(),
            _ => panic!(),
        };
        for (code, s) in codes.iter().zip(&orig) {
            assert_eq!(map.decode("c", *code as usize), Some(s.as_str()));
        }
    }

    #[test]
    fn encoding_map_applies_to_unseen_table() {
        let t = table(vec![(
            "c",
            ColumnKind::Categorical,
            cat(vec!["b", "a"]),
            vec![false; 2],
        )]);
        let (_, map) = label_encode(&t).unwrap();
        let unseen = table(vec![(
            "c",
            ColumnKind::Categorical,
            cat(vec!["a", "c"]),
            vec![false; 2],
        )]);
        let applied = map.apply(&unseen).unwrap();
        match &applied.column("c").unwrap().values {
            ColumnValues::Numeric(v) => assert_eq!(v, &vec![1.0, 2.0]),
            _ => panic!(),
        }
    }

    fn binary_table(n_pos: usize, n_neg: usize) -> Table {
        let n = n_pos + n_neg;
        let y: Vec<f64> = (0..n).map(|i| if i < n_pos { 1.0 } else { 0.0 }).collect();
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        table(vec![
            ("x", ColumnKind::Numeric, num(x), vec![false; n]),
            ("y", ColumnKind::Target, num(y), vec![false; n]),
        ])
    }

    #[test]
    fn split_is_stratified_within_one() {
        let t = binary_table(35, 965);
        let (train, test) = stratified_split(&t, 0.2, 11).unwrap();
        assert_eq!(train.n_rows() + test.n_rows(), 1000);
        let pos_test = test.labels().unwrap().iter().filter(|&&y| y == 1).count();
        let neg_test = test.n_rows() - pos_test;
        assert!((pos_test as i64 - 7).abs() <= 1, "pos_test = {pos_test}");
        assert!((neg_test as i64 - 193).abs() <= 1, "neg_test = {neg_test}");
    }

    #[test]
    fn split_two_rows_one_per_class() {
        let t = binary_table(1, 1);
        let (train, test) = stratified_split(&t, 0.5, 3).unwrap();
        assert_eq!(train.n_rows(), 1);
        assert_eq!(test.n_rows(), 1);
        let mut labels = vec![train.labels().unwrap()[0], test.labels().unwrap()[0]];
        labels.sort_unstable();
        assert_eq!(labels, vec![0, 1]);
    }

    #[test]
    fn split_deterministic_and_partitioning() {
        let t = binary_table(40, 160);
        let (tr1, te1) = stratified_split(&t, 0.25, 42).unwrap();
        let (tr2, te2) = stratified_split(&t, 0.25, 42).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
        // partition: every x value appears exactly once across both sides
        let mut seen: Vec<f64> = Vec::new();
        for side in [&tr1, &te1] {
            match &side.column("x").unwrap().values {
                ColumnValues::Numeric(v) => seen.extend_from_slice(v),
                _ => panic!(),
            }
        }
        seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(seen, (0..200).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn split_errors_when_class_would_be_empty() {
        // minority of 2 with a 1% test fraction: minority test share is 0
        let t = binary_table(2, 198);
        assert!(stratified_split(&t, 0.01, 1).is_err());
        // single-class target
        let t = binary_table(0, 50);
        assert!(stratified_split(&t, 0.2, 1).is_err());
    }

    #[test]
    fn schema_spec_parses_toml() {
        let spec = SchemaSpec::from_toml_str(
            r#"
key_column = "TransactionID"
target_column = "isFraud"
categorical = ["ProductCD", "DeviceType"]
na_tokens = ["", "NaN", "NA", "-999"]
"#,
        )
        .unwrap();
        assert_eq!(spec.key_column.as_deref(), Some("TransactionID"));
        assert_eq!(spec.categorical.len(), 2);
        assert_eq!(spec.na_tokens.len(), 4);
        let schema = spec
            .schema_for(&[
                "TransactionID".into(),
                "amt".into(),
                "ProductCD".into(),
                "isFraud".into(),
            ])
            .unwrap();
        assert_eq!(schema.kind_of("amt"), Some(ColumnKind::Numeric));
        assert_eq!(schema.kind_of("ProductCD"), Some(ColumnKind::Categorical));
        assert_eq!(schema.key_column(), Some("TransactionID"));
        assert_eq!(schema.target_column(), Some("isFraud"));
    }
}
