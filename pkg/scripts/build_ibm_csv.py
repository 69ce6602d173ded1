"""Rebuild the public IBM HR attrition CSV (35 columns) from the copy in `rdatasets`.

The R ``modeldata::attrition`` table holds the same 1470 rows but drops the
constant/identifier columns and replaces ordinal codes with their labels.
This script undoes both so the result matches the layout of the widely
distributed ``WA_Fn-UseC_-HR-Employee-Attrition.csv``.

    pip install rdatasets
    python scripts/build_ibm_csv.py data/WA_Fn-UseC_-HR-Employee-Attrition.csv
"""

import csv
import sys

import rdatasets

COLUMNS = [
    "Age", "Attrition", "BusinessTravel", "DailyRate", "Department",
    "DistanceFromHome", "Education", "EducationField", "EmployeeCount",
    "EmployeeNumber", "EnvironmentSatisfaction", "Gender", "HourlyRate",
    "JobInvolvement", "JobLevel", "JobRole", "JobSatisfaction", "MaritalStatus",
    "MonthlyIncome", "MonthlyRate", "NumCompaniesWorked", "Over18", "OverTime",
    "PercentSalaryHike", "PerformanceRating", "RelationshipSatisfaction",
    "StandardHours", "StockOptionLevel", "TotalWorkingYears",
    "TrainingTimesLastYear", "WorkLifeBalance", "YearsAtCompany",
    "YearsInCurrentRole", "YearsSinceLastPromotion", "YearsWithCurrManager",
]

SATISFACTION = {"Low": 1, "Medium": 2, "High": 3, "Very_High": 4}
LEVEL_CODES = {
    "Education": {"Below_College": 1, "College": 2, "Bachelor": 3, "Master": 4, "Doctor": 5},
    "EnvironmentSatisfaction": SATISFACTION,
    "JobInvolvement": SATISFACTION,
    "JobSatisfaction": SATISFACTION,
    "RelationshipSatisfaction": SATISFACTION,
    "PerformanceRating": {"Low": 1, "Good": 2, "Excellent": 3, "Outstanding": 4},
    "WorkLifeBalance": {"Bad": 1, "Good": 2, "Better": 3, "Best": 4},
}
SPACED = ("Department", "EducationField", "JobRole")


def restore(row):
    out = {}
    for name in COLUMNS:
        if name == "EmployeeCount":
            out[name] = 1
        elif name == "Over18":
            out[name] = "Y"
        elif name == "StandardHours":
            out[name] = 80
        elif name == "EmployeeNumber":
            out[name] = int(row["rownames"])
        elif name in LEVEL_CODES:
            out[name] = LEVEL_CODES[name][row[name]]
        elif name in SPACED:
            value = row[name]
            out[name] = "Research & Development" if value == "Research_Development" else value.replace("_", " ")
        else:
            value = row[name]
            out[name] = int(value) if not isinstance(value, str) else value
    return out


def main(path):
    frame = rdatasets.data("modeldata", "attrition")
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for record in frame.to_dict("records"):
            writer.writerow(restore(record))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/WA_Fn-UseC_-HR-Employee-Attrition.csv")
