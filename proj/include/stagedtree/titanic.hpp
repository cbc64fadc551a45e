#ifndef STAGEDTREE_TITANIC_HPP
#define STAGEDTREE_TITANIC_HPP

#include "stagedtree/dataset.hpp"

namespace stagedtree {

/// The 2201 passengers and crew of the Titanic as the public 4-way table
/// (Class x Sex x Age x Survived), expanded to one record per person.
/// Columns: Class (1st, 2nd, 3rd, Crew), Sex (Male, Female),
/// Age (Child, Adult), Survived (No, Yes); class column Survived.
CategoricalDataset titanic_dataset();

} // namespace stagedtree

#endif
