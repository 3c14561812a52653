// Left-tail critical values for the constant-only Dickey-Fuller t
// statistic, tabulated by tools/df_table_oracle with 1e6 replications
// per row (fixed seed 0xD1C8EF001). Rows are walk lengths N = 25, 50,
// 100, 250, 500 and an asymptotic row simulated at N = 2000; columns
// are the 1%, 5%, 10% quantiles.

namespace evtail::detail {

extern const double kAdfCritTable[6][3];
extern const double kAdfTableN[6];

const double kAdfCritTable[6][3] = {
    {-3.74515, -2.99691, -2.63795},
    {-3.57379, -2.92614, -2.60043},
    {-3.50259, -2.89189, -2.58306},
    {-3.45752, -2.87260, -2.57480},
    {-3.43899, -2.86925, -2.57171},
    {-3.43328, -2.86384, -2.56727},
};

const double kAdfTableN[6] = {25.0, 50.0, 100.0, 250.0, 500.0, 0.0};  // 0 marks 1/N = 0

}  // namespace evtail::detail
