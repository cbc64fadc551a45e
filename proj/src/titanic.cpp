#include "stagedtree/titanic.hpp"

namespace stagedtree {

CategoricalDataset titanic_dataset() {
    std::vector<VariableSpec> variables{
        VariableSpec("Class", {"1st", "2nd", "3rd", "Crew"}),
        VariableSpec("Sex", {"Male", "Female"}),
        VariableSpec("Age", {"Child", "Adult"}),
        VariableSpec("Survived", {"No", "Yes"}),
    };
    // counts[survived][age][sex][class]
    constexpr int counts[2][2][2][4] = {
        {{{0, 0, 35, 0}, {0, 0, 17, 0}}, {{118, 154, 387, 670}, {4, 13, 89, 3}}},
        {{{5, 11, 13, 0}, {1, 13, 14, 0}}, {{57, 14, 75, 192}, {140, 80, 76, 20}}},
    };
    std::vector<CategoricalDataset::Record> records;
    for (std::size_t survived = 0; survived < 2; ++survived) {
        for (std::size_t age = 0; age < 2; ++age) {
            for (std::size_t sex = 0; sex < 2; ++sex) {
                for (std::size_t cls = 0; cls < 4; ++cls) {
                    for (int i = 0; i < counts[survived][age][sex][cls]; ++i) {
                        records.push_back({cls, sex, age, survived});
                    }
                }
            }
        }
    }
    return CategoricalDataset(std::move(variables), std::move(records), "Survived");
}

} // namespace stagedtree
