use semgus::encode::{
    build_query, emit_smtlib, make_abstract, make_bounded, vectorize, Representation,
};
use semgus::problem::samples::{xor_problem, xor_singleton_problem};
use semgus::problem::WhileMode;

#[test]
fn emit_desk_files() {
    let dir = std::path::Path::new("/root/notes/desk");
    std::fs::create_dir_all(dir).unwrap();
    let cases = [
        ("single_tree", xor_singleton_problem(), Representation::Tree, false),
        ("single_list", xor_singleton_problem(), Representation::List, false),
        ("single_array", xor_singleton_problem(), Representation::Array, false),
        ("single_list_fused", xor_singleton_problem(), Representation::List, true),
        ("single_array_fused", xor_singleton_problem(), Representation::Array, true),
        ("full_list", xor_problem(), Representation::List, false),
        ("full_array_fused", xor_problem(), Representation::Array, true),
        ("vec_single_array_fused", vectorize(&xor_singleton_problem(), 1).unwrap(), Representation::Array, true),
        ("vec_full_array_fused", vectorize(&xor_problem(), 3).unwrap(), Representation::Array, true),
        ("vec_full_list_fused", vectorize(&xor_problem(), 3).unwrap(), Representation::List, true),
        ("abs_join_bit2", make_abstract(&xor_problem(), 2, WhileMode::Join).unwrap(), Representation::Array, true),
        ("abs_join_bit2_list", make_abstract(&xor_problem(), 2, WhileMode::Join).unwrap(), Representation::List, true),
        ("abs_join_bit2_tree", make_abstract(&xor_problem(), 2, WhileMode::Join).unwrap(), Representation::Tree, false),
        ("abs_havoc_bit2", make_abstract(&xor_problem(), 2, WhileMode::Havoc).unwrap(), Representation::Array, true),
        ("bounded_k2_single", make_bounded(&xor_singleton_problem(), 2).unwrap(), Representation::Array, true),
        ("bounded_k1_single", make_bounded(&xor_singleton_problem(), 1).unwrap(), Representation::Array, true),
    ];
    for (name, p, rep, fused) in cases {
        let prog = build_query(&p, rep, fused).unwrap();
        let text = emit_smtlib(&prog).unwrap();
        std::fs::write(dir.join(format!("{name}.smt2")), text).unwrap();
    }
}
