"""ユニットテストモジュール"""