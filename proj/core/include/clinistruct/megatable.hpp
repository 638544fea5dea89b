#pragma once

#include "clinistruct/catalog.hpp"
#include "clinistruct/extract.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace clinistruct {

/// Per-disease wide table: one row per patient (pseudonymous), one column per
/// catalog variable, cells in canonical text ("None" for absent).
struct MegaTable {
    struct Column {
        std::string variable_id;
        std::string display;
    };
    struct Row {
        std::string anonymized_id;
        std::vector<std::string> values;
    };

    std::string disease_id;
    std::vector<Column> columns; ///< catalog order
    std::vector<Row> rows;       ///< ordered by pseudonym's numeric suffix

    std::size_t column_index(std::string_view variable_id) const; ///< throws NotFoundError
    const std::string& cell(std::size_t row, std::string_view variable_id) const;
};

/// Folds assignments of one disease into the table; every row covers every
/// column. Assignments for other diseases are ignored.
MegaTable assemble_megatable(const DiseaseModule& module,
                             const std::vector<VariableAssignment>& assignments);

/// CSV with an "Anonymized ID" first column and variable displays as headers.
void write_megatable_csv(const MegaTable& table, const std::filesystem::path& path);

/// Self-describing JSON (variable ids + displays), the import counterpart.
void write_megatable_json(const MegaTable& table, const std::filesystem::path& path);
MegaTable read_megatable_json(const std::filesystem::path& path);

/// Reads a CSV export back; column mapping comes from the module.
MegaTable read_megatable_csv(const DiseaseModule& module, const std::filesystem::path& path);

} // namespace clinistruct
