//! Reading the two input formats.

use kmot::io::{parse_measures, parse_samples, to_measures_file};

fn main() -> kmot::Result<()> {
    let csv = "group,x1,x2\nA,0,0\nA,1,0\nA,0,0\nB,1,0\nB,1,1\nB,1,1\n";
    let ing = parse_samples(csv, None)?;
    println!("groups {:?}, sizes {:?}", ing.group_names, ing.collection.sizes());
    println!("support {:?}", ing.collection.support().points());

    let file = to_measures_file(&ing.collection, &ing.group_names);
    let json = serde_json::to_string_pretty(&file).expect("serializable");
    println!("{json}");
    let back = parse_measures(&json)?;
    assert_eq!(back.collection.sizes(), ing.collection.sizes());

    match parse_samples("group,x1\nA,1\nB,oops\n", None) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
