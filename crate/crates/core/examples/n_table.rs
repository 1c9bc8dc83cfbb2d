fn main() {
    let start = std::time::Instant::now();
    let t = goebel::theorems::build_table(2..=17, 2..=17, 5000).unwrap();
    print!("{}", t.to_csv());
    eprintln!("{:?}", start.elapsed());
    assert_eq!(t.to_csv(), goebel::theorems::TABLE1_CSV);
}
